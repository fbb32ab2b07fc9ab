#include "segfit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace lnsum {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

struct ActivityGrid {
    std::vector<double> oms;   // starts at 0
    std::vector<double> X1, X2, a1, b1;
    std::vector<double> cum;   // normalized cumulative activity on oms
    double omega_m = 0.0;
};

// Truncate the curve at the envelope cutoff and prepend the origin so that
// interpolation of X covers the whole first segment.
ActivityGrid activity_grid(const CumulantCurve& curve, bool require_decay) {
    const std::size_t n = curve.omegas.size();
    if (n < 4) throw config_error("segment plan: curve has too few points");
    std::size_t cut = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::exp(curve.X1[i]) < 1e-4) {
            cut = i;
            break;
        }
    }
    if (cut == n) {
        if (require_decay)
            throw convergence_error(
                "segment plan: envelope never falls below 1e-4 in range");
        cut = n - 1;
    }
    ActivityGrid g;
    g.omega_m = curve.omegas[cut];
    g.oms.push_back(0.0);
    g.X1.push_back(0.0);
    g.X2.push_back(0.0);
    g.a1.push_back(curve.a1[0]);
    g.b1.push_back(curve.b1[0]);
    for (std::size_t i = 0; i <= cut; ++i) {
        g.oms.push_back(curve.omegas[i]);
        g.X1.push_back(curve.X1[i]);
        g.X2.push_back(curve.X2[i]);
        g.a1.push_back(curve.a1[i]);
        g.b1.push_back(curve.b1[i]);
    }
    g.cum.assign(g.oms.size(), 0.0);
    for (std::size_t i = 1; i < g.oms.size(); ++i) {
        double d0 = std::hypot(g.a1[i - 1], g.b1[i - 1]);
        double d1 = std::hypot(g.a1[i], g.b1[i]);
        g.cum[i] = g.cum[i - 1] + 0.5 * (d0 + d1) * (g.oms[i] - g.oms[i - 1]);
    }
    double total = g.cum.back();
    if (!(total > 0.0)) throw convergence_error("segment plan: zero activity");
    for (auto& c : g.cum) c /= total;
    return g;
}

cplx X_at(const ActivityGrid& g, double w) {
    return cplx(interp(g.oms, g.X1, w), interp(g.oms, g.X2, w));
}

}  // namespace

SegmentPlan build_segment_plan(const CumulantCurve& curve, int n_segments,
                               int n_corrections) {
    if (n_segments < 2)
        throw config_error("build_segment_plan: need at least 2 segments");
    if (n_corrections < 0)
        throw config_error("build_segment_plan: negative correction count");
    ActivityGrid g = activity_grid(curve, true);

    std::vector<double> bounds(n_segments + 1);
    for (int i = 0; i <= n_segments; ++i)
        bounds[i] = interp(g.cum, g.oms, static_cast<double>(i) / n_segments);
    bounds.front() = 0.0;
    bounds.back() = g.omega_m;

    SegmentPlan plan;
    const int nloc = std::max(256, 32 * n_corrections);
    for (int i = 0; i < n_segments; ++i) {
        Segment seg;
        seg.lo = bounds[i];
        seg.hi = bounds[i + 1];
        if (!(seg.hi > seg.lo))
            throw convergence_error("build_segment_plan: degenerate segment");
        double mid = 0.5 * (seg.lo + seg.hi);
        seg.a = interp(g.oms, g.a1, mid);
        seg.b = interp(g.oms, g.b1, mid);
        seg.X_lo = (seg.lo == 0.0) ? cplx(0.0, 0.0) : X_at(g, seg.lo);
        seg.amplitude = std::exp(seg.X_lo.real());
        double Lseg = seg.hi - seg.lo;
        seg.slope = (X_at(g, seg.hi) - seg.X_lo) / Lseg;

        if (n_corrections > 0) {
            // least-squares sine fit of exp(X - Xlin) - 1 on interior samples
            Eigen::MatrixXd B(nloc, n_corrections);
            Eigen::VectorXd rr(nloc), ri(nloc);
            for (int j = 0; j < nloc; ++j) {
                double w = seg.lo + Lseg * (j + 1.0) / (nloc + 1.0);
                cplx resid = std::exp(X_at(g, w) - seg.X_lo -
                                      seg.slope * (w - seg.lo)) -
                             1.0;
                rr(j) = resid.real();
                ri(j) = resid.imag();
                for (int k = 0; k < n_corrections; ++k)
                    B(j, k) = std::sin(M_PI * (k + 1) * (w - seg.lo) / Lseg);
            }
            auto qr = B.colPivHouseholderQr();
            Eigen::VectorXd cr = qr.solve(rr), ci = qr.solve(ri);
            for (int k = 0; k < n_corrections; ++k)
                seg.corrections.push_back(cplx(cr(k), ci(k)));
        }
        plan.segments.push_back(std::move(seg));
    }
    plan.omega_m = g.omega_m;
    plan.a_m = interp(g.oms, g.a1, g.omega_m);
    plan.b_m = interp(g.oms, g.b1, g.omega_m);
    plan.X_m = X_at(g, g.omega_m);
    return plan;
}

std::vector<double> node_intervals(const CumulantCurve& curve, int target_count) {
    if (target_count < 1) throw config_error("node_intervals: count must be >= 1");
    ActivityGrid g = activity_grid(curve, false);
    std::vector<double> nodes(target_count);
    for (int i = 0; i < target_count; ++i)
        nodes[i] = interp(g.cum, g.oms, (i + 0.5) / target_count);
    return nodes;
}

namespace {

struct FitWork {
    std::vector<double> omegas;
    std::vector<cplx> phis;
};

// local attenuation / group delay from the sampled chf itself
void local_slopes(const FitWork& w, std::vector<double>& a1,
                  std::vector<double>& b1) {
    const std::size_t n = w.omegas.size();
    std::vector<double> X1(n), X2(n);
    double prev_arg = std::arg(w.phis[0]);
    double offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        X1[i] = std::log(std::max(std::abs(w.phis[i]), 1e-300));
        double a = std::arg(w.phis[i]);
        double d = a - prev_arg;
        if (d > M_PI) offset -= 2.0 * M_PI;
        if (d < -M_PI) offset += 2.0 * M_PI;
        prev_arg = a;
        X2[i] = a + offset;
    }
    a1.assign(n, 0.0);
    b1.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = (i == 0) ? 0 : i - 1;
        std::size_t hi = (i + 1 == n) ? i : i + 1;
        double dw = w.omegas[hi] - w.omegas[lo];
        a1[i] = -(X1[hi] - X1[lo]) / dw;
        b1[i] = (X2[hi] - X2[lo]) / dw;
    }
}

struct LmResult {
    Eigen::VectorXd p;
    double cost = 0.0;
    bool converged = false;
};

// residuals: [Re(model - phi); Im(model - phi); 30 (sum A - 1)]
LmResult run_lm(const FitWork& w, Eigen::VectorXd p, int K) {
    const int n = static_cast<int>(w.omegas.size());
    const int m = 2 * n + 1;
    auto eval = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                    Eigen::MatrixXd* J) {
        r.setZero(m);
        if (J) J->setZero(m, 3 * K);
        double suma = 0.0;
        for (int k = 0; k < K; ++k) suma += q(k) * q(k);
        for (int i = 0; i < n; ++i) {
            cplx model = 0.0;
            for (int k = 0; k < K; ++k) {
                double A = q(k) * q(k);
                double a = std::exp(q(K + k)), b = std::exp(q(2 * K + k));
                // fully decayed term: value and derivatives vanish (avoid 0*inf)
                if (a * w.omegas[i] > 700.0) continue;
                cplx E = std::exp(cplx(-a, b) * w.omegas[i]);
                model += A * E;
                if (J) {
                    cplx dA = 2.0 * q(k) * E;
                    cplx da = A * (-a * w.omegas[i]) * E;
                    cplx db = A * cplx(0.0, b * w.omegas[i]) * E;
                    (*J)(i, k) = dA.real();
                    (*J)(n + i, k) = dA.imag();
                    (*J)(i, K + k) = da.real();
                    (*J)(n + i, K + k) = da.imag();
                    (*J)(i, 2 * K + k) = db.real();
                    (*J)(n + i, 2 * K + k) = db.imag();
                }
            }
            cplx d = model - w.phis[i];
            r(i) = d.real();
            r(n + i) = d.imag();
        }
        r(2 * n) = 30.0 * (suma - 1.0);
        if (J)
            for (int k = 0; k < K; ++k) (*J)(2 * n, k) = 60.0 * q(k);
    };

    Eigen::VectorXd r(m);
    Eigen::MatrixXd J(m, 3 * K);
    eval(p, r, &J);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd grad = J.transpose() * r;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-10) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd Aug = JtJ;
            for (int k = 0; k < 3 * K; ++k)
                Aug(k, k) += lambda * std::max(JtJ(k, k), 1e-12);
            Eigen::VectorXd step = Aug.ldlt().solve(-grad);
            Eigen::VectorXd cand = p + step;
            for (int k = 0; k < K; ++k) {
                cand(k) = std::clamp(cand(k), -2.0, 2.0);
                cand(K + k) = std::clamp(cand(K + k), std::log(1e-6), std::log(1e6));
                cand(2 * K + k) =
                    std::clamp(cand(2 * K + k), std::log(1e-6), std::log(1e6));
            }
            Eigen::VectorXd rc(m);
            eval(cand, rc, nullptr);
            double cc = rc.squaredNorm();
            if (std::isfinite(cc) && cc < cost) {
                if (cost - cc < 1e-14 * (cost + 1e-30) ||
                    step.lpNorm<Eigen::Infinity>() < 1e-12)
                    converged = true;
                p = cand;
                cost = cc;
                lambda = std::max(lambda / 3.0, 1e-12);
                eval(p, r, &J);
                accepted = true;
                break;
            }
            lambda *= 2.0;
            if (lambda > 1e12) break;
        }
        if (!accepted) converged = true;  // no descent direction left
    }
    LmResult out;
    out.p = p;
    out.cost = cost;
    out.converged = converged;
    return out;
}

}  // namespace

ArctanMixture fit_exponential_sum(const TransformTable& samples,
                                  const std::vector<double>& nodes, int K,
                                  double* final_residual) {
    if (samples.axis != Axis::imaginary_omega)
        throw config_error("fit_exponential_sum: samples must be on the chf axis");
    const std::size_t n = samples.grid.size();
    if (n < 8 || samples.values.size() != n)
        throw config_error("fit_exponential_sum: bad sample table");
    if (K < 1 || static_cast<std::size_t>(K) > n / 4)
        throw config_error("fit_exponential_sum: K must be in [1, samples/4]");
    if (nodes.empty()) throw config_error("fit_exponential_sum: no seed nodes");

    FitWork w;
    w.omegas = samples.grid;
    w.phis = samples.values;
    std::vector<double> a1, b1;
    local_slopes(w, a1, b1);

    // seed nodes: K quantile entries of the supplied node list
    std::vector<double> seeds(K);
    for (int k = 0; k < K; ++k) {
        double pos = (k + 0.5) / K * (nodes.size() - 1);
        seeds[k] = nodes[static_cast<std::size_t>(std::lround(pos))];
    }

    auto seed_params = [&](double node, double& a0, double& b0) {
        a0 = std::max(interp(w.omegas, a1, node), 1e-2);
        b0 = std::max(interp(w.omegas, b1, node), 1e-2);
    };

    int cur_K = K;
    Eigen::VectorXd p(3 * K);
    for (int k = 0; k < K; ++k) {
        double a0, b0;
        seed_params(seeds[k], a0, b0);
        p(k) = std::sqrt(1.0 / K);
        p(K + k) = std::log(a0);
        p(2 * K + k) = std::log(b0);
    }

    LmResult res = run_lm(w, p, cur_K);
    for (int edit = 0; edit < 5; ++edit) {
        // unpack
        std::vector<double> A(cur_K), aa(cur_K), bb(cur_K);
        for (int k = 0; k < cur_K; ++k) {
            A[k] = res.p(k) * res.p(k);
            aa[k] = std::exp(res.p(cur_K + k));
            bb[k] = std::exp(res.p(2 * cur_K + k));
        }
        // delete negligible terms
        std::vector<int> keep;
        for (int k = 0; k < cur_K; ++k)
            if (A[k] >= 1e-4) keep.push_back(k);
        bool changed = false;
        if (static_cast<int>(keep.size()) < cur_K && keep.size() >= 1) {
            changed = true;
        } else {
            // insert at the frequency of maximum pointwise residual when a
            // single point dominates half the total squared residual
            double total = 0.0, worst = 0.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                cplx model = 0.0;
                for (int k = 0; k < cur_K; ++k)
                    model += A[k] * std::exp(cplx(-aa[k], bb[k]) * w.omegas[i]);
                double e2 = std::norm(model - w.phis[i]);
                total += e2;
                if (e2 > worst) {
                    worst = e2;
                    worst_i = i;
                }
            }
            if (worst > 0.5 * total && static_cast<std::size_t>(cur_K) < n / 4) {
                double a0, b0;
                seed_params(w.omegas[worst_i], a0, b0);
                keep.clear();
                for (int k = 0; k < cur_K; ++k) keep.push_back(k);
                A.push_back(0.01);
                aa.push_back(a0);
                bb.push_back(b0);
                keep.push_back(cur_K);
                changed = true;
            }
        }
        if (!changed) break;
        int nk = static_cast<int>(keep.size());
        Eigen::VectorXd q(3 * nk);
        for (int j = 0; j < nk; ++j) {
            int k = keep[j];
            q(j) = std::sqrt(A[k]);
            q(nk + j) = std::log(aa[k]);
            q(2 * nk + j) = std::log(bb[k]);
        }
        cur_K = nk;
        res = run_lm(w, q, cur_K);
    }

    if (!std::isfinite(res.cost))
        throw convergence_error("fit_exponential_sum: cost diverged");

    ArctanMixture mix;
    double suma = 0.0;
    for (int k = 0; k < cur_K; ++k) suma += res.p(k) * res.p(k);
    if (!(suma > 0.0))
        throw convergence_error("fit_exponential_sum: all weights vanished");
    for (int k = 0; k < cur_K; ++k) {
        ArctanTerm t;
        t.A = res.p(k) * res.p(k) / suma;
        t.a = std::exp(res.p(cur_K + k));
        t.b = std::exp(res.p(2 * cur_K + k));
        if (!(t.a > 0.0))
            throw convergence_error("fit_exponential_sum: nonpositive rate");
        mix.terms.push_back(t);
    }
    if (final_residual) *final_residual = std::sqrt(res.cost);
    return mix;
}

QuantileBracket quantile_bracket(double a, double b) {
    if (!(a > 0.0)) throw config_error("quantile_bracket: a must be positive");
    auto F = [a, b](double x) {
        return (std::atan((b + x) / a) + std::atan((x - b) / a)) / M_PI;
    };
    auto solve = [&](double q) {
        double lo = 0.0, hi = std::hypot(a, b) + a;
        while (F(hi) < q) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (F(mid) < q)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-14 * (1.0 + hi)) break;
        }
        return 0.5 * (lo + hi);
    };
    QuantileBracket out;
    out.x10 = solve(0.1);
    out.x50 = solve(0.5);
    out.x90 = solve(0.9);
    return out;
}

}  // namespace lnsum
