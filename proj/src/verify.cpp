#include "superint/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "superint/error.hpp"

namespace superint {

namespace {

constexpr Variance L = Variance::Lower;

// Running max of residual components and of the terms entering them.
struct Residual {
  double abs = 0.0;
  double scale = 0.0;

  void err(double v) { abs = std::max(abs, std::abs(v)); }
  void term(double v) { scale = std::max(scale, std::abs(v)); }
  void terms(std::initializer_list<double> vs) {
    for (double v : vs) term(v);
  }
};

CheckResult make_result(const std::string& name, const std::string& ref, const Residual& r,
                        double tol, bool informational = false) {
  CheckResult c;
  c.name = name;
  c.paper_ref = ref;
  c.max_abs_residual = r.abs;
  c.scale = r.scale;
  c.rel_residual = r.abs / (1.0 + r.scale);
  c.tolerance = tol;
  c.pass = c.rel_residual <= tol;
  c.points_evaluated = 1;
  c.informational = informational;
  return c;
}

double tol_identity(const SystemDef& sys, const std::string& name) {
  return sys.tolerances.for_check(name, sys.tolerances.identity);
}

double tol_jet(const SystemDef& sys, const std::string& name) {
  return sys.tolerances.for_check(name, sys.tolerances.jet_solve);
}

std::vector<double> raise(const std::vector<double>& w, const DenseTensor& g_inv) {
  const std::size_t n = w.size();
  std::vector<double> up(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) up[a] += g_inv(a, b) * w[b];
  return up;
}

std::vector<double> gradient(const Jet3& V) {
  std::vector<double> d(V.dim());
  for (std::size_t i = 0; i < V.dim(); ++i) d[i] = V.grad(i);
  return d;
}

// t_i = T_ia^a with partials (l, i).
TensorField trace_field(const StructureSolution& s) {
  const std::size_t n = s.T.dim();
  TensorField t{DenseTensor(n, {L}), DenseTensor(n, {L, L})};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a) {
      t.value(i) += s.T(i, a, a);
      for (std::size_t l = 0; l < n; ++l) t.partials(l, i) += (*s.dT)(l, i, a, a);
    }
  return t;
}

CheckResult trace_closed(const SystemDef& sys, const StructureSolution& s, const std::string& ref) {
  const DenseTensor dt = exterior_d(trace_field(s));
  Residual r;
  for (double v : dt.data()) r.err(v);
  for (double v : s.dT->data()) r.term(v);
  return make_result("trace-closed", ref, r, tol_jet(sys, "trace-closed"));
}

CheckResult ricci_symmetric(const SystemDef& sys, const CurvatureBundle& cb) {
  const std::size_t n = cb.Ric.dim();
  Residual r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      r.err(cb.Ric(i, j) - cb.Ric(j, i));
      r.term(cb.Ric(i, j));
    }
  return make_result("ricci-symmetric", "Ric_ij = Ric_ji", r, tol_jet(sys, "ricci-symmetric"));
}

CheckResult scal_trB(const SystemDef& sys, const CurvatureBundle& cb) {
  Residual r;
  r.err(cb.scal + cb.trB);
  r.terms({cb.scal, cb.trB});
  return make_result("scal-trB", "Scal = g^{ij} Ric_ij = -g^{ij} B_ij", r, tol_identity(sys, "scal-trB"));
}

CheckResult first_bianchi(const SystemDef& sys, const DenseTensor& R) {
  const std::size_t n = R.dim();
  Residual r;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          r.err(R(b, i, j, k) + R(b, j, k, i) + R(b, k, i, j));
          r.term(R(b, i, j, k));
        }
  return make_result("first-bianchi", "R^b_ijk + R^b_jki + R^b_kij = 0", r,
                     tol_jet(sys, "first-bianchi"));
}

double tau_rel(const StructureSolution& s) {
  return s.tau.max_abs() / (1.0 + s.T.max_abs());
}

std::vector<CheckResult> nondeg_checks(const SystemDef& sys, const InducedConnection& ic) {
  const std::size_t n = sys.n;
  const double dn = static_cast<double>(n);
  const auto& m = ic.basis.metric;
  const auto& g = m.g;
  const auto& gi = m.g_inv;
  const auto& lc = ic.basis.levi_civita;
  const auto& st = ic.structure;
  const auto& T = st.T;
  const auto& tau = st.tau;
  const CurvatureBundle cb = contractions(curvature(ic.connection), m);
  std::vector<CheckResult> out;

  {
    Residual r;
    for (std::size_t a = 0; a < ic.basis.V.size(); ++a) {
      const Jet3& V = ic.basis.V[a];
      const auto& h = ic.basis.hess[a];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double tdv = 0.0;
          for (std::size_t k = 0; k < n; ++k) tdv += T(i, j, k) * V.grad(k);
          const double lap = h.laplacian * g(i, j) / dn;
          r.err(h.hessian(i, j) - tdv - tau(i, j) * V.value() - lap);
          r.terms({h.hessian(i, j), tdv, tau(i, j) * V.value(), lap});
        }
    }
    out.push_back(make_result("wilczynski-residual",
                              "Hess^g_ij V = T_ij^k d_k V + tau_ij V + (1/n) Lap^g V g_ij", r,
                              tol_identity(sys, "wilczynski-residual")));
  }

  const double cn = 1.0 / (dn * (dn - 2.0));
  DenseTensor tau_b(n, {L, L});
  {
    Residual r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        tau_b(i, j) = cn * (cb.B(i, j) - g(i, j) * cb.trB - (dn - 1.0) * cb.Ric(i, j));
        r.err(tau(i, j) - tau_b(i, j));
        r.terms({tau(i, j), cn * cb.B(i, j), cn * g(i, j) * cb.trB, cn * (dn - 1.0) * cb.Ric(i, j)});
      }
    out.push_back(make_result("tau-from-curvature",
                              "tau_ij = (B_ij - g_ij trB - (n-1) Ric_ij) / (n(n-2))", r,
                              tol_jet(sys, "tau-from-curvature")));
  }
  {
    // g_ib g^{ac} R^b_caj - g_ij g^{ac} R^b_cab - (n-1) R^b_ibj, straight from R.
    const auto& R = cb.R;
    double trace_term = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t b = 0; b < n; ++b) trace_term += gi(a, c) * R(b, c, a, b);
    Residual r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double first = 0.0;
        double ric = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          ric += R(b, i, b, j);
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t c = 0; c < n; ++c) first += g(i, b) * gi(a, c) * R(b, c, a, j);
        }
        const double idx = cn * (first - g(i, j) * trace_term - (dn - 1.0) * ric);
        r.err(idx - tau_b(i, j));
        r.terms({cn * first, cn * g(i, j) * trace_term, cn * (dn - 1.0) * ric});
      }
    out.push_back(make_result("tau-index-form",
                              "(g_ib g^ac R^b_caj - g_ij g^ac R^b_cab - (n-1) R^b_ibj)/(n(n-2)) equals "
                              "the B-form of tau",
                              r, tol_identity(sys, "tau-index-form")));
  }
  {
    const double c1 = cb.scal / ((dn - 1.0) * (dn - 2.0));
    Residual r;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            const double t1 = c1 * (g(i, j) * g(k, a) - g(i, k) * g(j, a));
            const double t2 = cn * (g(i, j) * ((dn - 1.0) * cb.B(a, k) - cb.Ric(a, k)) -
                                    g(i, k) * ((dn - 1.0) * cb.B(a, j) - cb.Ric(a, j)));
            const double t3 = cn * ((cb.B(i, j) - (dn - 1.0) * cb.Ric(i, j)) * g(a, k) -
                                    (cb.B(i, k) - (dn - 1.0) * cb.Ric(i, k)) * g(a, j));
            r.err(cb.Riem(a, i, j, k) - t1 - t2 - t3);
            r.terms({cb.Riem(a, i, j, k), t1, t2, t3});
          }
    out.push_back(make_result("riem-identity",
                              "Riem_aijk = Scal (g_ij g_ka - g_ik g_ja)/((n-1)(n-2)) + "
                              "[g_ij((n-1)B_ak - Ric_ak) - g_ik((n-1)B_aj - Ric_aj) + "
                              "(B_ij - (n-1)Ric_ij) g_ak - (B_ik - (n-1)Ric_ik) g_aj]/(n(n-2))",
                              r, tol_jet(sys, "riem-identity")));
  }
  {
    const double w = 1.0 / (dn - 1.0);
    const DenseTensor tau_up = raise_index(tau, 0, gi);  // tau^b_k
    Residual r;
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            const double t1 = tau(i, j) * (b == k) - tau(i, k) * (b == j);
            const double t2 = w * g(i, j) * (tau_up(b, k) + cb.B_up(b, k));
            const double t3 = w * g(i, k) * (tau_up(b, j) + cb.B_up(b, j));
            r.err(cb.R(b, i, j, k) - t1 - t2 + t3);
            r.terms({cb.R(b, i, j, k), t1, t2, t3});
          }
    out.push_back(make_result("riem-tau-identity",
                              "R^b_ijk = tau_ij d^b_k - tau_ik d^b_j + g_ij(tau^b_k + B^b_k)/(n-1) - "
                              "g_ik(tau^b_j + B^b_j)/(n-1)",
                              r, tol_jet(sys, "riem-tau-identity")));
  }
  {
    const DenseTensor Dt = covariant_d(st.tau_field(), ic.connection);  // (k, i, j)
    std::vector<double> tt(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) tt[k] += gi(i, j) * (Dt(k, i, j) - Dt(j, i, k));
    const double w = 1.0 / (dn - 1.0);
    Residual r;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double c = Dt(k, i, j) - Dt(j, i, k);
          r.err(c + w * (g(i, j) * tt[k] - g(i, k) * tt[j]));
          r.terms({Dt(k, i, j), Dt(j, i, k), w * g(i, j) * tt[k], w * g(i, k) * tt[j]});
        }
    out.push_back(make_result("cotton-identity",
                              "nabla_k tau_ij - nabla_j tau_ik + (g_ij t_k - g_ik t_j)/(n-1) = 0, "
                              "t_k = g^ij (nabla_k tau_ij - nabla_j tau_ik)",
                              r, tol_jet(sys, "cotton-identity")));
  }
  {
    const DenseTensor Dg = covariant_d(metric_field(m), ic.connection);  // (k, i, j)
    std::vector<double> t(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a) t[j] += T(j, a, a);
    const double w = 1.0 / (dn - 1.0);
    Residual r;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double rhs = w * (t[j] * g(i, k) - t[k] * g(i, j));
          r.err(Dg(k, i, j) - Dg(j, i, k) - rhs);
          r.terms({Dg(k, i, j), Dg(j, i, k), rhs});
        }
    out.push_back(make_result("metric-derivative-identity",
                              "nabla_k g_ij - nabla_j g_ik = (T_ja^a g_ik - T_ka^a g_ij)/(n-1)", r,
                              tol_identity(sys, "metric-derivative-identity")));
  }
  out.push_back(trace_closed(sys, st, "d(T_ia^a) = 0"));
  out.push_back(ricci_symmetric(sys, cb));
  out.push_back(scal_trB(sys, cb));

  {
    // Closed prolongation, printed form, in two readings, and the form that
    // follows from differentiating the structure equation.
    const DenseTensor ric_g = contractions(curvature(lc), m).Ric;
    const DenseTensor DT_lc = covariant_d(st.T_field(), lc);               // (l, i, j, k)
    const DenseTensor Dtau_lc = covariant_d(st.tau_field(), lc);           // (l, i, j)
    const DenseTensor DT_ind = covariant_d(st.T_field(), ic.connection);
    const DenseTensor Dtau_ind = covariant_d(st.tau_field(), ic.connection);
    std::vector<double> t(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a) t[j] += T(j, a, a);

    auto printed = [&](const DenseTensor& DT, const DenseTensor& Dtau) {
      // q_ka = nabla_c T_ka^c + T_ck^b T_ba^d g_da - Ric^g_ka + tau_ka
      Residual r;
      for (std::size_t a = 0; a < ic.basis.V.size(); ++a) {
        const Jet3& V = ic.basis.V[a];
        const auto up = raise(gradient(V), gi);
        const auto dlap = laplacian_gradient(V, lc, m);
        for (std::size_t k = 0; k < n; ++k) {
          double qv = 0.0;
          for (std::size_t b = 0; b < n; ++b) {
            double q = tau(k, b) - ric_g(k, b);
            for (std::size_t c = 0; c < n; ++c) q += DT(c, k, b, c);
            for (std::size_t c = 0; c < n; ++c)
              for (std::size_t e = 0; e < n; ++e)
                for (std::size_t d = 0; d < n; ++d) q += T(c, k, e) * T(e, c, d) * g(d, b);
            qv += q * up[b];
          }
          double div = 0.0;
          for (std::size_t c = 0; c < n; ++c)
            for (std::size_t e = 0; e < n; ++e) div += gi(c, e) * Dtau(c, e, k);
          const double lhs = (dn - 1.0) / dn * dlap[k];
          r.err(lhs - qv - div * V.value());
          r.terms({lhs, qv, div * V.value()});
        }
      }
      return r;
    };
    out.push_back(make_result("prolongation",
                              "((n-1)/n) d_k Lap V = q_ka V^,a + div(tau)_k V, q_ij = T^a_ij;a + "
                              "T_ai^b T_baj - Ric^g_ij + tau_ij (Levi-Civita derivatives)",
                              printed(DT_lc, Dtau_lc), tol_jet(sys, "prolongation")));
    out.push_back(make_result("prolongation.nabla-T",
                              "printed prolongation with induced-connection derivatives",
                              printed(DT_ind, Dtau_ind), tol_jet(sys, "prolongation.nabla-T"), true));

    Residual r;
    for (std::size_t a = 0; a < ic.basis.V.size(); ++a) {
      const Jet3& V = ic.basis.V[a];
      const auto dlap = laplacian_gradient(V, lc, m);
      const double lap = ic.basis.hess[a].laplacian;
      for (std::size_t k = 0; k < n; ++k) {
        double first = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
          double c = 0.0;
          for (std::size_t b = 0; b < n; ++b) {
            c += (tau(k, b) - ric_g(k, b)) * gi(b, q);
            for (std::size_t i = 0; i < n; ++i) {
              c += gi(i, b) * DT_lc(b, i, k, q);
              for (std::size_t e = 0; e < n; ++e) c += gi(i, b) * T(i, k, e) * T(e, b, q);
            }
          }
          first += c * V.grad(q);
        }
        double zeroth = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t b = 0; b < n; ++b) {
            zeroth += gi(i, b) * Dtau_lc(i, b, k);
            for (std::size_t e = 0; e < n; ++e) zeroth += gi(i, b) * T(i, k, e) * tau(e, b);
          }
        const double lhs = (dn - 1.0) / dn * dlap[k];
        const double tl = t[k] * lap / dn;
        r.err(lhs - first - zeroth * V.value() - tl);
        r.terms({lhs, first, zeroth * V.value(), tl});
      }
    }
    out.push_back(make_result("prolongation.derived",
                              "((n-1)/n) d_k Lap V = [g^ia T_ik^m;a + g^ia T_ik^c T_ca^m + tau_k^m - "
                              "Ric^g_k^m] V_m + [div(tau)_k + g^ia T_ik^c tau_ca] V + (1/n) T_ka^a Lap V",
                              r, tol_jet(sys, "prolongation.derived")));
  }
  out.push_back(first_bianchi(sys, cb.R));

  if (tau_rel(st) <= sys.tolerances.properness) {
    const double w = 1.0 / (dn - 1.0);
    Residual r;
    Residual rv;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            const double t1 = w * g(i, j) * cb.B(a, k);
            const double t2 = w * g(i, k) * cb.B(a, j);
            r.err(cb.Riem(a, i, j, k) - t1 + t2);
            r.terms({cb.Riem(a, i, j, k), t1, t2});
            auto bh = [&](std::size_t x, std::size_t y) {
              return (dn - 1.0) * cb.Ric(x, y) + g(x, y) * cb.scal;
            };
            const double v1 = w * g(i, j) * bh(a, k);
            const double v2 = w * g(i, k) * bh(a, j);
            rv.err(cb.Riem(a, i, j, k) - v1 + v2);
            rv.terms({cb.Riem(a, i, j, k), v1, v2});
          }
    out.push_back(make_result("proper-projective", "tau = 0: Riem_aijk = (g_ij B_ak - g_ik B_aj)/(n-1)",
                              r, tol_jet(sys, "proper-projective")));
    out.push_back(make_result("proper-projective.restated",
                              "tau = 0: Riem_aijk = (g_ij B'_ak - g_ik B'_aj)/(n-1), "
                              "B' = (n-1) Ric + g Scal",
                              rv, tol_jet(sys, "proper-projective.restated"), true));
  }
  return out;
}

std::vector<CheckResult> semideg_checks(const SystemDef& sys, const InducedConnection& ic) {
  const std::size_t n = sys.n;
  const double dn = static_cast<double>(n);
  const double w = 1.0 / (dn - 1.0);
  const auto& m = ic.basis.metric;
  const auto& g = m.g;
  const auto& gi = m.g_inv;
  const auto& st = ic.structure;
  const auto& eta = st.tau;
  const CurvatureBundle cb = contractions(curvature(ic.connection), m);
  std::vector<CovariantHessian> ind;
  for (const auto& V : ic.basis.V) ind.push_back(covariant_hessian(V, ic.connection, m));
  std::vector<CheckResult> out;

  {
    Residual r;
    for (std::size_t a = 0; a < ind.size(); ++a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double ev = eta(i, j) * ic.basis.V[a].value();
          r.err(ind[a].hessian(i, j) - ev);
          r.terms({ind[a].hessian(i, j), ev});
        }
    out.push_back(make_result("wilczynski-residual", "Hess_ij V = eta_ij V (induced connection)", r,
                              tol_identity(sys, "wilczynski-residual")));
  }
  {
    Residual r;
    Residual rv;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        r.err(eta(i, j) + w * cb.Ric(i, j));
        r.terms({eta(i, j), w * cb.Ric(i, j)});
        rv.err(eta(i, j) - w * cb.Ric(i, j));
        rv.terms({eta(i, j), w * cb.Ric(i, j)});
      }
    out.push_back(make_result("eta-from-ricci", "eta = -Ric/(n-1)", r, tol_jet(sys, "eta-from-ricci")));
    out.push_back(make_result("eta-from-ricci.sign-variant", "eta = +Ric/(n-1)", rv,
                              tol_jet(sys, "eta-from-ricci.sign-variant"), true));
  }
  {
    Residual r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) {
            r.err(cb.Proj(i, j, k, l));
            r.terms({cb.Riem(i, j, k, l), w * cb.Ric(j, l) * g(i, k), w * cb.Ric(j, k) * g(i, l)});
          }
    out.push_back(make_result("projective-weyl-zero",
                              "Riem_ijkl - (Ric_jl g_ik - Ric_jk g_il)/(n-1) = 0", r,
                              tol_jet(sys, "projective-weyl-zero")));
  }
  {
    Residual r;
    for (std::size_t a = 0; a < ind.size(); ++a) {
      const double sv = w * cb.scal * ic.basis.V[a].value();
      r.err(ind[a].laplacian + sv);
      r.terms({ind[a].laplacian, sv});
    }
    out.push_back(make_result("laplace-eigen", "Lap V + Scal V/(n-1) = 0 (induced connection)", r,
                              tol_jet(sys, "laplace-eigen")));
  }
  {
    const auto s_up = raise(st.s, gi);
    Residual r;
    for (std::size_t a = 0; a < ind.size(); ++a) {
      double ds = 0.0;
      for (std::size_t k = 0; k < n; ++k) ds += s_up[k] * ic.basis.V[a].grad(k);
      const double lg = ic.basis.hess[a].laplacian;
      r.err(lg - ind[a].laplacian - ds);
      r.terms({lg, ind[a].laplacian, ds});
    }
    out.push_back(make_result("laplace-relation", "Lap^g V - Lap V = dV(s)", r,
                              tol_identity(sys, "laplace-relation")));
  }
  out.push_back(ricci_symmetric(sys, cb));
  out.push_back(trace_closed(sys, st, "d(D_ka^a) = 0"));
  out.push_back(scal_trB(sys, cb));
  out.push_back(first_bianchi(sys, cb.R));

  if (tau_rel(st) <= sys.tolerances.properness) {
    Residual r;
    for (double v : cb.R.data()) {
      r.err(v);
      r.term(v);
    }
    for (std::size_t a = 0; a < ind.size(); ++a) {
      r.err(ind[a].laplacian);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r.term(gi(i, j) * ind[a].hessian(i, j));
    }
    out.push_back(make_result("proper-flat", "eta = 0: R = 0 and Lap V = 0", r,
                              tol_jet(sys, "proper-flat")));
  }
  return out;
}

void require_symmetric(const SystemDef& sys, const KillingDecl& K) {
  const std::size_t n = sys.n;
  if (K.entries.size() != n * n) throw ValidationError("Killing tensor '" + K.label + "' has wrong shape");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!structurally_equal(K.at(i, j, n).root(), K.at(j, i, n).root())) {
        throw ValidationError("Killing tensor '" + K.label + "' is not symmetric");
      }
}

std::vector<Jet3> killing_jets(const KillingDecl& K, std::span<const double> p) {
  std::vector<Jet3> out;
  for (const auto& e : K.entries) out.push_back(eval_jet(e, p));
  return out;
}

bool is_gated(const std::string& name) {
  return name.rfind("proper-projective", 0) == 0 || name == "proper-flat";
}

}  // namespace

void merge_result(CheckResult& into, const CheckResult& point) {
  const std::size_t pts = into.points_evaluated + point.points_evaluated;
  if (into.points_evaluated == 0 || point.rel_residual > into.rel_residual ||
      (std::isnan(point.rel_residual) && !std::isnan(into.rel_residual))) {
    const bool informational = into.points_evaluated == 0 ? point.informational : into.informational;
    into = point;
    into.informational = informational;
  }
  into.points_evaluated = pts;
  into.pass = into.rel_residual <= into.tolerance;
}

std::vector<CheckResult> check_nondeg(const SystemDef& sys, std::span<const double> point) {
  return nondeg_checks(sys, build_connection(sys, point, StructureMode::NonDegenerate));
}

std::vector<CheckResult> check_semideg(const SystemDef& sys, std::span<const double> point) {
  return semideg_checks(sys, build_connection(sys, point, StructureMode::SemiDegenerate));
}

std::vector<CheckResult> check_levi_civita(const SystemDef& sys, std::span<const double> point) {
  const MetricPointData m = metric_at(sys, point);
  const CurvatureBundle cb = contractions(curvature(christoffel(m)), m);
  return {first_bianchi(sys, cb.R), ricci_symmetric(sys, cb)};
}

CheckResult check_properness(const SystemDef& sys, const std::vector<std::vector<double>>& points,
                             StructureMode mode) {
  CheckResult acc;
  for (const auto& p : points) {
    const StructureSolution s = solve_structure_point(sys, p, mode);
    Residual r;
    r.err(s.tau.max_abs());
    r.term(s.T.max_abs());
    merge_result(acc, make_result("properness",
                                  mode == StructureMode::NonDegenerate ? "proper iff tau = 0"
                                                                        : "proper iff eta = 0",
                                  r, sys.tolerances.for_check("properness", sys.tolerances.properness),
                                  true));
  }
  return acc;
}

CheckResult check_killing(const SystemDef& sys, const KillingDecl& K, std::span<const double> point) {
  require_symmetric(sys, K);
  const std::size_t n = sys.n;
  const MetricPointData m = metric_at(sys, point);
  const ConnectionPointData lc = christoffel(m);
  const auto kj = killing_jets(K, point);
  auto Kv = [&](std::size_t i, std::size_t j) { return kj[i * n + j].value(); };
  // DK(k, i, j) = nabla_k K_ij
  DenseTensor DK(n, {L, L, L});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double v = kj[i * n + j].grad(k);
        for (std::size_t a = 0; a < n; ++a) v -= lc.gamma(a, k, i) * Kv(a, j) + lc.gamma(a, k, j) * Kv(i, a);
        DK(k, i, j) = v;
      }
  DenseTensor S(n, {L, L, L});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) S(k, i, j) = (DK(k, i, j) + DK(i, j, k) + DK(j, k, i)) / 3.0;
  Residual r;
  for (double v : DK.data()) r.term(v);
  if (K.kind == KillingKind::Proper) {
    for (double v : S.data()) r.err(v);
  } else {
    std::vector<double> c(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[k] += m.g_inv(i, j) * S(k, i, j);
    const double cw = 1.0 / (static_cast<double>(n) + 2.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          r.err(S(k, i, j) - cw * (m.g(i, j) * c[k] + m.g(j, k) * c[i] + m.g(k, i) * c[j]));
  }
  const std::string name = "killing[" + K.label + "]";
  return make_result(name,
                     K.kind == KillingKind::Proper ? "nabla_(i K_jk) = 0"
                                                   : "trace-free part of nabla_(i C_jk) = 0",
                     r, tol_identity(sys, name));
}

CheckResult check_bertrand_darboux(const SystemDef& sys, const KillingDecl& K,
                                   std::size_t basis_index, std::span<const double> point) {
  require_symmetric(sys, K);
  if (basis_index >= sys.basis.size()) throw ValidationError("basis index out of range");
  const std::size_t n = sys.n;
  const MetricPointData m = metric_at(sys, point);
  const ConnectionPointData lc = christoffel(m);
  const auto kj = killing_jets(K, point);
  const Jet3 V = eval_jet(sys.basis[basis_index], point);
  const auto& gi = m.g_inv;
  const auto& G = lc.gamma;
  const auto& dG = lc.dgamma;
  auto C = [&](std::size_t i, std::size_t j) -> const Jet3& { return kj[i * n + j]; };

  // rho_k = c g^ab nabla_b C_ak and its partials.
  const bool conformal = K.kind == KillingKind::Conformal;
  const double c = 2.0 / (static_cast<double>(n) + 2.0);
  std::vector<double> rho(n, 0.0);
  DenseTensor drho(n, {L, L});  // (j, k) = d_j rho_k
  if (conformal) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double nab = C(a, k).grad(b);
          for (std::size_t e = 0; e < n; ++e) nab -= G(e, b, a) * C(e, k).value() + G(e, b, k) * C(a, e).value();
          rho[k] += c * gi(a, b) * nab;
          for (std::size_t j = 0; j < n; ++j) {
            double dnab = C(a, k).hess(j, b);
            for (std::size_t e = 0; e < n; ++e) {
              dnab -= dG(j, e, b, a) * C(e, k).value() + G(e, b, a) * C(e, k).grad(j);
              dnab -= dG(j, e, b, k) * C(a, e).value() + G(e, b, k) * C(a, e).grad(j);
            }
            drho(j, k) += c * (m.dg_inv(j, a, b) * nab + gi(a, b) * dnab);
          }
        }
  }
  // d_j omega_k, omega_k = C_k^a d_a V - rho_k V.
  DenseTensor domega(n, {L, L});
  Residual r;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      double v = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          const double t1 = m.dg_inv(j, a, b) * C(b, k).value() * V.grad(a);
          const double t2 = gi(a, b) * C(b, k).grad(j) * V.grad(a);
          const double t3 = gi(a, b) * C(b, k).value() * V.hess(j, a);
          v += t1 + t2 + t3;
          r.terms({t1, t2, t3});
        }
      const double t4 = drho(j, k) * V.value();
      const double t5 = rho[k] * V.grad(j);
      v -= t4 + t5;
      r.terms({t4, t5});
      domega(j, k) = v;
    }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) r.err(domega(j, k) - domega(k, j));
  const std::string name = "bertrand-darboux[" + K.label + "]";
  return make_result(name,
                     conformal ? "d(C(dV)) - V d(rho) - dV ^ rho = 0, rho = 2 div(C)/(n+2)"
                               : "d(K(dV)) = 0",
                     r, tol_identity(sys, name));
}

std::size_t SuiteReport::passed() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                [](const CheckResult& c) { return c.pass; }));
}

std::size_t SuiteReport::failed() const { return results.size() - passed(); }

std::string sign_convention_string() {
  return "R^b_ijk = d_j G^b_ki - d_k G^b_ji + G^b_ja G^a_ki - G^b_ka G^a_ji; "
         "Ric_ij = R^b_ibj; induced connection G~ = G + T";
}

namespace {

class Aggregate {
 public:
  void add(const CheckResult& c) {
    auto it = index_.find(c.name);
    if (it == index_.end()) {
      index_[c.name] = items_.size();
      items_.push_back(c);
    } else {
      merge_result(items_[it->second], c);
    }
  }
  void add(const std::vector<CheckResult>& cs) {
    for (const auto& c : cs) add(c);
  }
  const std::vector<CheckResult>& items() const { return items_; }

 private:
  std::vector<CheckResult> items_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace

SuiteReport run_suite(const SystemDef& sys, std::size_t npoints, std::uint64_t seed) {
  SuiteReport rep;
  rep.system = sys.name;
  rep.seed = seed;
  rep.points = npoints;
  rep.sign_convention = sign_convention_string();
  rep.mode = "none";
  rep.classification = "none";
  rep.properness = "n/a";
  const auto pts = sample_points(sys, npoints, seed);
  Aggregate agg;

  if (!sys.has_potential()) {
    for (const auto& p : pts) agg.add(check_levi_civita(sys, p));
  } else {
    const DegeneracyClass cls = classify_degeneracy(sys, pts);
    rep.classification = to_string(cls.kind);
    rep.per_point_ranks = cls.per_point_ranks;
    if (cls.kind == DegeneracyKind::HigherDegeneracy) {
      rep.mode = "higher";
      for (const auto& p : pts) agg.add(check_levi_civita(sys, p));
    } else {
      const StructureMode mode = cls.mode();
      rep.mode = to_string(mode);
      std::vector<std::vector<double>> agreeing;
      rep.condition_min = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (cls.per_point_ranks[i] != cls.rank) continue;
        agreeing.push_back(pts[i]);
        const InducedConnection ic = build_connection(sys, pts[i], mode);
        rep.condition_min = std::min(rep.condition_min, ic.structure.condition);
        rep.condition_max = std::max(rep.condition_max, ic.structure.condition);
        agg.add(mode == StructureMode::NonDegenerate ? nondeg_checks(sys, ic) : semideg_checks(sys, ic));
      }
      const CheckResult prop = check_properness(sys, agreeing, mode);
      rep.properness = prop.pass ? "proper" : "conformal";
      rep.diagnostics.push_back(prop);
      if (!prop.pass) {
        Aggregate kept;
        for (const auto& c : agg.items())
          if (!is_gated(c.name)) kept.add(c);
        agg = kept;
      }
    }
  }
  for (const auto& K : sys.killing) {
    for (const auto& p : pts) {
      agg.add(check_killing(sys, K, p));
      for (std::size_t b = 0; b < sys.basis.size(); ++b) agg.add(check_bertrand_darboux(sys, K, b, p));
    }
  }
  for (const auto& c : agg.items()) (c.informational ? rep.diagnostics : rep.results).push_back(c);
  return rep;
}

}  // namespace superint
