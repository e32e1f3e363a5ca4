#include "qkin/evolver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qkin/errors.hpp"
#include "qkin/fft.hpp"
#include "qkin/rng.hpp"

namespace qkin {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Friction advection speed v(s) = (beta Gamma hbar / (2 X0 M)) G'(s/X0).
// G' is odd, so the principal value at a singular origin is zero.
double friction_velocity(double s, const PhysicalParams& p, const Correlator& g) {
    const double coef =
        p.beta() * p.spreading_width * p.hbar / (2.0 * p.correlation_length * p.mass);
    if (s == 0.0) {
        try {
            return coef * g.deriv(0.0);
        } catch (const singular_derivative_error&) {
            return 0.0;
        }
    }
    return coef * g.deriv(s / p.correlation_length);
}

struct CubicWeights {
    int base;  // index of the second stencil point
    double w[4];
};

CubicWeights cubic_weights(double frac_pos) {
    CubicWeights cw;
    const double fl = std::floor(frac_pos);
    cw.base = static_cast<int>(fl);
    const double w = frac_pos - fl;
    cw.w[0] = -w * (w - 1.0) * (w - 2.0) / 6.0;
    cw.w[1] = (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0;
    cw.w[2] = -(w + 1.0) * w * (w - 2.0) / 2.0;
    cw.w[3] = (w + 1.0) * w * (w - 1.0) / 6.0;
    return cw;
}

// One RK4 step of ds/dtau = v(s) over h, used to trace the characteristic
// foot point of the friction term.
double rk4_foot(double s, double h, const PhysicalParams& p, const Correlator& g) {
    const auto v = [&](double x) { return friction_velocity(x, p, g); };
    const double k1 = v(s);
    const double k2 = v(s + 0.5 * h * k1);
    const double k3 = v(s + 0.5 * h * k2);
    const double k4 = v(s + h * k3);
    return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct FrictionStage {
    std::vector<CubicWeights> weights;
    bool active = false;
};

FrictionStage make_friction_stage(const DensityMatrixGrid& grid, const PhysicalParams& p,
                                  const Correlator& g, double h) {
    FrictionStage st;
    const int ns = grid.ns();
    st.weights.resize(ns);
    const double ds = grid.ds();
    for (int is = 0; is < ns; ++is) {
        const double s = grid.s_at(is);
        const double foot = rk4_foot(s, h, p, g);
        if (foot != s) st.active = true;
        st.weights[is] = cubic_weights((foot - grid.s_at(0)) / ds);
    }
    return st;
}

void apply_friction(DensityMatrixGrid& grid, const FrictionStage& st,
                    std::vector<cdouble>& row) {
    if (!st.active) return;
    const int nr = grid.nr(), ns = grid.ns();
    for (int ir = 0; ir < nr; ++ir) {
        cdouble* prow = grid.data() + static_cast<std::size_t>(ir) * ns;
        std::copy(prow, prow + ns, row.begin());
        for (int is = 0; is < ns; ++is) {
            const auto& cw = st.weights[is];
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < 4; ++j) {
                int idx = (cw.base - 1 + j) % ns;
                if (idx < 0) idx += ns;
                acc += cw.w[j] * row[idx];
            }
            prow[is] = acc;
        }
    }
}

struct Monitors {
    double trace_defect;
    double herm_defect;
    double min_diag;
    bool finite;
};

Monitors measure(const DensityMatrixGrid& g) {
    Monitors m{};
    const cdouble tr = g.trace();
    m.trace_defect = std::abs(tr - cdouble(1.0, 0.0));
    m.herm_defect = g.hermiticity_defect();
    m.min_diag = g.min_diagonal();
    m.finite = std::isfinite(m.trace_defect) && std::isfinite(m.herm_defect);
    return m;
}

// Quadratic-exponential test function f = exp(a0 + a1 X + a2 Y + a3 X^2 +
// a4 Y^2 + a5 X Y) with complex coefficients; closed under differentiation,
// which gives both generator forms analytically.
struct TestFunction {
    cdouble a[6];

    cdouble eval_xy(double x, double y) const {
        return std::exp(a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * y * y +
                        a[5] * x * y);
    }
    cdouble dx(double x, double y) const { return a[1] + 2.0 * a[3] * x + a[5] * y; }
    cdouble dy(double x, double y) const { return a[2] + 2.0 * a[4] * y + a[5] * x; }
    cdouble dxx(double x, double y) const {
        const cdouble d = dx(x, y);
        return d * d + 2.0 * a[3];
    }
    cdouble dyy(double x, double y) const {
        const cdouble d = dy(x, y);
        return d * d + 2.0 * a[4];
    }

    // Independent (r,s) route: substitute the linear map into the quadratic.
    struct RsForm {
        cdouble b[6];
        cdouble eval(double r, double s) const {
            return std::exp(b[0] + b[1] * r + b[2] * s + b[3] * r * r + b[4] * s * s +
                            b[5] * r * s);
        }
        cdouble dr(double r, double s) const { return b[1] + 2.0 * b[3] * r + b[5] * s; }
        cdouble ds(double r, double s) const { return b[2] + 2.0 * b[4] * s + b[5] * r; }
        cdouble drds(double r, double s) const { return dr(r, s) * ds(r, s) + b[5]; }
    };

    RsForm rs_form() const {
        RsForm f;
        f.b[0] = a[0];
        f.b[1] = a[1] + a[2];
        f.b[2] = 0.5 * (a[1] - a[2]);
        f.b[3] = a[3] + a[4] + a[5];
        f.b[4] = 0.25 * (a[3] + a[4] - a[5]);
        f.b[5] = a[3] - a[4];
        return f;
    }
};

}  // namespace

void SolverOptions::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverOptions: dt must be > 0");
    if (n_steps < 1) throw std::invalid_argument("SolverOptions: n_steps must be >= 1");
    if (snapshot_stride < 1)
        throw std::invalid_argument("SolverOptions: snapshot_stride must be >= 1");
    if (absorbing_mask && !(absorb_width_frac > 0.0 && absorb_width_frac < 0.5))
        throw std::invalid_argument("SolverOptions: absorb_width_frac must be in (0, 0.5)");
}

double verify_coordinate_transform(const PhysicalParams& p, const Correlator& g,
                                   const Potential& u, std::uint64_t seed, int n_functions,
                                   int n_points) {
    const CounterRng rng(seed);
    const double x0 = p.correlation_length;
    // Friction coefficients: -(beta Gamma hbar / 4 X0 M) G' (P_X - P_Y) in
    // (X,Y), which becomes +i (beta Gamma hbar^2 / 2 X0 M) G' d_s in (r,s).
    const double cf_xy =
        p.beta() * p.spreading_width * p.hbar / (4.0 * x0 * p.mass);
    const double cf_rs =
        p.beta() * p.spreading_width * p.hbar * p.hbar / (2.0 * x0 * p.mass);
    const double gamma = p.spreading_width;

    double worst = 0.0;
    for (int fi = 0; fi < n_functions; ++fi) {
        TestFunction tf;
        for (int c = 0; c < 6; ++c) {
            const auto [re, im] = rng.uniform_pair(fi * 16 + c, 0x7e57);
            tf.a[c] = cdouble(re - 0.5, im - 0.5);
        }
        const auto rs = tf.rs_form();

        double scale = 0.0;
        std::vector<cdouble> diffs;
        diffs.reserve(n_points);
        for (int pi = 0; pi < n_points; ++pi) {
            const auto [ur, us] = rng.uniform_pair(fi * 1000 + pi, 0xbeef);
            const double r = 2.0 * ur - 1.0;
            double s = 2.0 * us - 1.0;
            if (s == 0.0) s = 0.5;
            const double x = r + 0.5 * s, y = r - 0.5 * s;

            double gp;
            try {
                gp = g.deriv(s / x0);
            } catch (const singular_derivative_error&) {
                continue;
            }
            const double gv = g.eval(s / x0);
            const cdouble f = tf.eval_xy(x, y);

            // (X,Y) form: kinetic difference, potential difference, friction
            // with (P_X - P_Y) = -i hbar (d_X - d_Y), decoherence.
            const cdouble fx = tf.dx(x, y) * f, fy = tf.dy(x, y) * f;
            const cdouble fxx = tf.dxx(x, y) * f, fyy = tf.dyy(x, y) * f;
            const cdouble l_xy = -p.hbar * p.hbar / (2.0 * p.mass) * (fxx - fyy) +
                                 (u.eval(x) - u.eval(y)) * f -
                                 cf_xy * gp * cdouble(0.0, -p.hbar) * (fx - fy) +
                                 cdouble(0.0, gamma) * (gv - 1.0) * f;

            // (r,s) form through the independently substituted quadratic.
            const cdouble h = rs.eval(r, s);
            const cdouble l_rs = -p.hbar * p.hbar / p.mass * rs.drds(r, s) * h +
                                 (u.eval(r + 0.5 * s) - u.eval(r - 0.5 * s)) * h +
                                 cdouble(0.0, cf_rs) * gp * rs.ds(r, s) * h +
                                 cdouble(0.0, gamma) * (gv - 1.0) * h;

            diffs.push_back(l_xy - l_rs);
            scale = std::max(scale, std::max(std::abs(l_xy), std::abs(l_rs)));
        }
        for (const auto& d : diffs)
            if (scale > 0.0) worst = std::max(worst, std::abs(d) / scale);
    }
    if (worst > 1e-8)
        throw transform_mismatch_error("generator forms disagree: relative deviation " +
                                       std::to_string(worst));
    return worst;
}

DensityMatrixGrid apply_generator(const DensityMatrixGrid& rho, const PhysicalParams& p,
                                  const Correlator& g, const Potential& u,
                                  bool include_kinetic, bool include_friction) {
    const int nr = rho.nr(), ns = rho.ns();
    const double x0 = p.correlation_length;
    FftWorkspace fft(nr, ns);

    DensityMatrixGrid out(nr, ns, rho.r_extent(), rho.s_extent());
    out.time_stamp = rho.time_stamp;

    // Mixed kinetic term -(hbar^2/M) d_r d_s rho, spectral.
    if (include_kinetic) {
        std::vector<cdouble> work(rho.data(), rho.data() + rho.size());
        fft.forward_2d(work.data());
        for (int m = 0; m < nr; ++m) {
            const double kr = two_pi * freq_index(m, nr) / rho.r_extent();
            for (int n = 0; n < ns; ++n) {
                const double ks = two_pi * freq_index(n, ns) / rho.s_extent();
                work[static_cast<std::size_t>(m) * ns + n] *= -kr * ks;  // (i kr)(i ks)
            }
        }
        fft.inverse_2d(work.data());
        const double coef = -p.hbar * p.hbar / p.mass;
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = coef * work[i];
    }

    // Friction term i (beta Gamma hbar^2 / 2 X0 M) G'(s/X0) d_s rho.
    if (include_friction && p.spreading_width != 0.0) {
        std::vector<cdouble> work(rho.data(), rho.data() + rho.size());
        fft.forward_rows(work.data());
        for (int m = 0; m < nr; ++m) {
            cdouble* prow = work.data() + static_cast<std::size_t>(m) * ns;
            for (int n = 0; n < ns; ++n) {
                const double ks = two_pi * freq_index(n, ns) / rho.s_extent();
                prow[n] *= cdouble(0.0, ks);
            }
        }
        fft.inverse_rows(work.data());
        for (int ir = 0; ir < nr; ++ir) {
            for (int is = 0; is < ns; ++is) {
                const double vs = friction_velocity(rho.s_at(is), p, g) * p.hbar;
                // i * c_f * G' * d_s == i hbar v(s) d_s
                out.at(ir, is) += cdouble(0.0, vs) * work[static_cast<std::size_t>(ir) * ns + is];
            }
        }
    }

    // Local terms: potential difference and decoherence.
    for (int ir = 0; ir < nr; ++ir) {
        const double r = rho.r_at(ir);
        for (int is = 0; is < ns; ++is) {
            const double s = rho.s_at(is);
            const double du = u.eval(r + 0.5 * s) - u.eval(r - 0.5 * s);
            const double dec = p.spreading_width * (g.eval(s / x0) - 1.0);
            out.at(ir, is) += (du + cdouble(0.0, dec)) * rho.at(ir, is);
        }
    }
    return out;
}

Trajectory evolve(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                  const Correlator& g, const Potential& u, const SolverOptions& opts) {
    opts.validate();
    verify_coordinate_transform(p, g, u);

    const int nr = rho0.nr(), ns = rho0.ns();
    const double x0 = p.correlation_length;
    const double dt = opts.dt;

    Trajectory traj;
    traj.snapshots.push_back(rho0);

    FftWorkspace fft(nr, ns);
    DensityMatrixGrid state = rho0;
    DensityMatrixGrid prev = rho0;

    // Stage A half-step multiplier exp(-i (hbar/M) k_r k_s dt/2), with the
    // optional 2/3-rule mask folded into the second half-step.
    std::vector<cdouble> aphase, aphase_masked;
    const bool kinetic = !opts.disable_kinetic;
    if (kinetic || opts.dealias) {
        aphase.resize(rho0.size());
        aphase_masked.resize(rho0.size());
        for (int m = 0; m < nr; ++m) {
            const double kr = two_pi * freq_index(m, nr) / rho0.r_extent();
            const bool mask_r = std::abs(freq_index(m, nr)) > nr / 3;
            for (int n = 0; n < ns; ++n) {
                const double ks = two_pi * freq_index(n, ns) / rho0.s_extent();
                const double arg = kinetic ? -(p.hbar / p.mass) * kr * ks * 0.5 * dt : 0.0;
                cdouble ph(std::cos(arg), std::sin(arg));
                aphase[static_cast<std::size_t>(m) * ns + n] = ph;
                const bool mask_s = std::abs(freq_index(n, ns)) > ns / 3;
                aphase_masked[static_cast<std::size_t>(m) * ns + n] =
                    (opts.dealias && (mask_r || mask_s)) ? cdouble(0.0, 0.0) : ph;
            }
        }
    }

    // Stage B multiplier exp(dt (-i dU/hbar + (Gamma/hbar)(G - 1))).
    std::vector<cdouble> bfac(rho0.size());
    for (int ir = 0; ir < nr; ++ir) {
        const double r = rho0.r_at(ir);
        for (int is = 0; is < ns; ++is) {
            const double s = rho0.s_at(is);
            const double du = u.eval(r + 0.5 * s) - u.eval(r - 0.5 * s);
            const double damp = p.spreading_width / p.hbar *
                                (g.eval(s / x0) - 1.0);
            const double mag = std::exp(dt * damp);
            const double arg = -dt * du / p.hbar;
            bfac[static_cast<std::size_t>(ir) * ns + is] =
                mag * cdouble(std::cos(arg), std::sin(arg));
        }
    }

    // Stage C: friction characteristics for a dt/2 substep.
    FrictionStage cstage;
    const bool friction = !opts.disable_friction && p.spreading_width != 0.0;
    if (friction) cstage = make_friction_stage(rho0, p, g, 0.5 * dt);

    // Absorbing taper in r (cos^2 ramp over the edge fraction).
    std::vector<double> absorb;
    if (opts.absorbing_mask) {
        absorb.resize(nr, 1.0);
        const int w = std::max(1, static_cast<int>(opts.absorb_width_frac * nr));
        for (int i = 0; i < w; ++i) {
            const double x = std::numbers::pi * 0.5 * (w - i) / w;
            const double m = std::cos(x) * std::cos(x);
            absorb[i] = m;
            absorb[nr - 1 - i] = m;
        }
    }

    std::vector<cdouble> row(ns);

    const auto apply_a = [&](const std::vector<cdouble>& phase) {
        fft.forward_2d(state.data());
        cdouble* d = state.data();
        for (std::size_t i = 0; i < state.size(); ++i) d[i] *= phase[i];
        fft.inverse_2d(state.data());
    };

    const bool rk4 = opts.scheme == Scheme::Rk4Spectral;

    for (int step = 1; step <= opts.n_steps; ++step) {
        prev = state;

        if (!rk4) {
            if (kinetic) apply_a(aphase);
            if (friction) apply_friction(state, cstage, row);
            {
                cdouble* d = state.data();
                for (std::size_t i = 0; i < state.size(); ++i) d[i] *= bfac[i];
            }
            if (friction) apply_friction(state, cstage, row);
            if (kinetic)
                apply_a(opts.dealias ? aphase_masked : aphase);
            else if (opts.dealias)
                apply_a(aphase_masked);
        } else {
            // Classic RK4 on d_t rho = -(i/hbar) L rho.
            const auto rhs = [&](const DensityMatrixGrid& x) {
                DensityMatrixGrid l =
                    apply_generator(x, p, g, u, kinetic, friction);
                const cdouble c = cdouble(0.0, -1.0 / p.hbar);
                for (std::size_t i = 0; i < l.size(); ++i) l.data()[i] *= c;
                return l;
            };
            DensityMatrixGrid k1 = rhs(state);
            DensityMatrixGrid tmp = state;
            for (std::size_t i = 0; i < tmp.size(); ++i)
                tmp.data()[i] = state.data()[i] + 0.5 * dt * k1.data()[i];
            DensityMatrixGrid k2 = rhs(tmp);
            for (std::size_t i = 0; i < tmp.size(); ++i)
                tmp.data()[i] = state.data()[i] + 0.5 * dt * k2.data()[i];
            DensityMatrixGrid k3 = rhs(tmp);
            for (std::size_t i = 0; i < tmp.size(); ++i)
                tmp.data()[i] = state.data()[i] + dt * k3.data()[i];
            DensityMatrixGrid k4 = rhs(tmp);
            for (std::size_t i = 0; i < state.size(); ++i)
                state.data()[i] += dt / 6.0 *
                                   (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] +
                                    k4.data()[i]);
        }

        if (opts.absorbing_mask) {
            for (int ir = 0; ir < nr; ++ir) {
                cdouble* prow = state.data() + static_cast<std::size_t>(ir) * ns;
                for (int is = 0; is < ns; ++is) prow[is] *= absorb[ir];
            }
        }

        state.time_stamp = rho0.time_stamp + step * dt;

        const Monitors m = measure(state);
        ConservationRecord rec;
        rec.step = step;
        rec.time = state.time_stamp;
        rec.trace_defect = m.trace_defect;
        rec.hermiticity_defect = m.herm_defect;
        rec.min_diagonal = m.min_diag;
        rec.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();

        const bool at_snapshot = (step % opts.snapshot_stride == 0) || step == opts.n_steps;
        if (opts.positivity_monitor && at_snapshot)
            rec.min_eigenvalue = coarse_min_eigenvalue(state, opts.positivity_dim);
        traj.conservation_log.push_back(rec);

        if (!m.finite) {
            traj.status = RunStatus::AbortedNonFinite;
            traj.message = "non-finite values at step " + std::to_string(step) +
                           "; returning last valid state";
            traj.snapshots.push_back(prev);
            return traj;
        }
        if (!opts.absorbing_mask && m.trace_defect > opts.trace_tol) {
            traj.status = RunStatus::EarlyStopTrace;
            traj.message = "trace defect " + std::to_string(m.trace_defect) +
                           " exceeded tolerance at step " + std::to_string(step);
            traj.snapshots.push_back(state);
            return traj;
        }
        if (at_snapshot) traj.snapshots.push_back(state);
    }

    traj.status = RunStatus::Completed;
    return traj;
}

double residual_norm(const std::vector<DensityMatrixGrid>& slices, const PhysicalParams& p,
                     const Correlator& g, const Potential& u, bool include_kinetic,
                     bool include_friction) {
    if (slices.size() < 3)
        throw std::domain_error("residual_norm: need at least three time slices");
    const std::size_t mid = slices.size() / 2;
    const DensityMatrixGrid& lo = slices[mid - 1];
    const DensityMatrixGrid& c = slices[mid];
    const DensityMatrixGrid& hi = slices[mid + 1];
    const double dt2 = hi.time_stamp - lo.time_stamp;
    if (!(dt2 > 0.0)) throw std::invalid_argument("residual_norm: times must increase");

    const DensityMatrixGrid lrho =
        apply_generator(c, p, g, u, include_kinetic, include_friction);

    double num = 0.0, den = 0.0;
    const cdouble ih(0.0, p.hbar);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const cdouble dtrho = ih * (hi.data()[i] - lo.data()[i]) / dt2;
        num += std::norm(dtrho - lrho.data()[i]);
        den += std::norm(dtrho);
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

double coarse_min_eigenvalue(const DensityMatrixGrid& rho, int m) {
    const int nr = rho.nr(), ns = rho.ns();
    m = std::min(m, nr / 2);
    // X points on an even-index sublattice so midpoints land on the grid.
    int stride = std::max(2, (nr / 2) / m);
    if (stride % 2 != 0) ++stride;
    const int start = rho.r_zero_index() - (m / 2) * stride;

    const double ds = rho.ds();
    const double s0 = rho.s_at(0);
    auto sample_s = [&](int ir_mid, double s_val) -> cdouble {
        if (s_val < s0 || s_val >= s0 + rho.s_extent()) return cdouble(0.0, 0.0);
        const auto cw = cubic_weights((s_val - s0) / ds);
        cdouble acc(0.0, 0.0);
        for (int j = 0; j < 4; ++j) {
            int idx = (cw.base - 1 + j) % ns;
            if (idx < 0) idx += ns;
            acc += cw.w[j] * rho.at(ir_mid, idx);
        }
        return acc;
    };

    Eigen::MatrixXcd mat(m, m);
    for (int a = 0; a < m; ++a) {
        const int ia = start + a * stride;
        for (int b = 0; b < m; ++b) {
            const int ib = start + b * stride;
            const int ir_mid = (ia + ib) / 2;
            const double s_val = rho.r_at(ia) - rho.r_at(ib);
            mat(a, b) = (ir_mid >= 0 && ir_mid < nr) ? sample_s(ir_mid, s_val)
                                                     : cdouble(0.0, 0.0);
        }
    }
    const Eigen::MatrixXcd herm = 0.5 * (mat + mat.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                       Eigen::EigenvaluesOnly);
    const double dx = stride * rho.dr();
    return es.eigenvalues().minCoeff() * dx;
}

}  // namespace qkin
