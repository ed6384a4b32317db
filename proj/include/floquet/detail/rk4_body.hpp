#pragma once

// Shared RK4 body. Included by exactly one translation unit per ISA, each of
// which supplies a pack type P:
//
//   P::V, P::width, load, store, set1, add, sub, mul, neg, abs,
//   P::M, none, exceeds(a, b) (true where !(a <= b), NaN included), mask_or, bits
//
// Everything here has internal linkage so no instantiation compiled for one
// ISA can be merged into another translation unit by the linker.

#include <cstddef>

#include "floquet/kernels.hpp"

namespace {

template <class P>
struct Cplx {
  typename P::V re, im;
};

template <class P>
inline Cplx<P> cmul(const Cplx<P>& a, const Cplx<P>& b) {
  return {P::sub(P::mul(a.re, b.re), P::mul(a.im, b.im)), P::add(P::mul(a.re, b.im), P::mul(a.im, b.re))};
}

template <class P>
inline Cplx<P> cadd(const Cplx<P>& a, const Cplx<P>& b) {
  return {P::add(a.re, b.re), P::add(a.im, b.im)};
}

template <class P>
inline Cplx<P> csub(const Cplx<P>& a, const Cplx<P>& b) {
  return {P::sub(a.re, b.re), P::sub(a.im, b.im)};
}

template <class P>
inline Cplx<P> cneg(const Cplx<P>& a) {
  return {P::neg(a.re), P::neg(a.im)};
}

template <class P>
inline Cplx<P> cscale(typename P::V s, const Cplx<P>& a) {
  return {P::mul(s, a.re), P::mul(s, a.im)};
}

using floquet::kernels::kComponents;

template <class P>
struct State {
  Cplx<P> c[kComponents];
};

// Right-hand side of the first-order system at coefficient q = E + V(x).
template <class P>
inline State<P> rhs(const Cplx<P>& q, const State<P>& y) {
  using namespace floquet::kernels;
  State<P> k;
  k.c[U1] = y.c[U1p];
  k.c[U1p] = cneg(cmul(q, y.c[U1]));
  k.c[U2] = y.c[U2p];
  k.c[U2p] = cneg(cmul(q, y.c[U2]));
  k.c[W1] = y.c[W1p];
  k.c[W1p] = csub(cneg(cmul(q, y.c[W1])), y.c[U1]);
  k.c[W2] = y.c[W2p];
  k.c[W2p] = csub(cneg(cmul(q, y.c[W2])), y.c[U2]);
  return k;
}

// y + s*k
template <class P>
inline State<P> axpy(const State<P>& y, typename P::V s, const State<P>& k) {
  State<P> out;
  for (int i = 0; i < kComponents; ++i) out.c[i] = cadd(y.c[i], cscale<P>(s, k.c[i]));
  return out;
}

template <class P>
void rk4_body(const floquet::kernels::Rk4Problem& pb, int first_step, int n_steps, double* state,
              int* fail_step) {
  using V = typename P::V;
  using M = typename P::M;
  constexpr std::size_t W = P::width;

  const V h = P::set1(pb.h);
  const V half_h = P::set1(0.5 * pb.h);
  const V sixth_h = P::set1(pb.h / 6.0);
  const V two = P::set1(2.0);
  const V limit = P::set1(floquet::kernels::kOverflowLimit);
  const std::size_t stride = pb.stride;

  for (std::size_t lane = 0; lane < pb.lanes; lane += W) {
    State<P> y;
    for (int i = 0; i < kComponents; ++i) {
      y.c[i].re = P::load(state + (2 * i) * stride + lane);
      y.c[i].im = P::load(state + (2 * i + 1) * stride + lane);
    }
    const Cplx<P> energy{P::load(pb.e_re + lane), P::load(pb.e_im + lane)};

    unsigned failed = 0;
    for (std::size_t j = 0; j < W; ++j) {
      if (fail_step[lane + j] >= 0) failed |= 1U << j;
    }

    for (int s = first_step; s < first_step + n_steps; ++s) {
      const std::size_t node = 2 * static_cast<std::size_t>(s);
      const Cplx<P> q0 = cadd(energy, Cplx<P>{P::set1(pb.v_re[node]), P::set1(pb.v_im[node])});
      const Cplx<P> qm = cadd(energy, Cplx<P>{P::set1(pb.v_re[node + 1]), P::set1(pb.v_im[node + 1])});
      const Cplx<P> q1 = cadd(energy, Cplx<P>{P::set1(pb.v_re[node + 2]), P::set1(pb.v_im[node + 2])});

      const State<P> k1 = rhs(q0, y);
      const State<P> k2 = rhs(qm, axpy(y, half_h, k1));
      const State<P> k3 = rhs(qm, axpy(y, half_h, k2));
      const State<P> k4 = rhs(q1, axpy(y, h, k3));

      M bad = P::none();
      for (int i = 0; i < kComponents; ++i) {
        const Cplx<P> incr = cadd(cadd(k1.c[i], cscale<P>(two, k2.c[i])), cadd(cscale<P>(two, k3.c[i]), k4.c[i]));
        y.c[i] = cadd(y.c[i], cscale<P>(sixth_h, incr));
        bad = P::mask_or(bad, P::mask_or(P::exceeds(P::abs(y.c[i].re), limit),
                                         P::exceeds(P::abs(y.c[i].im), limit)));
      }
      const unsigned fresh = P::bits(bad) & ~failed;
      if (fresh != 0) {
        for (std::size_t j = 0; j < W; ++j) {
          if (fresh & (1U << j)) fail_step[lane + j] = s;
        }
        failed |= fresh;
      }
    }

    for (int i = 0; i < kComponents; ++i) {
      P::store(state + (2 * i) * stride + lane, y.c[i].re);
      P::store(state + (2 * i + 1) * stride + lane, y.c[i].im);
    }
  }
}

}  // namespace
