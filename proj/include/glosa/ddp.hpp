#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glosa/deterministic.hpp"
#include "glosa/escape.hpp"
#include "glosa/expected_cost.hpp"
#include "glosa/scenario.hpp"
#include "glosa/types.hpp"

namespace glosa {

struct DdpParams {
    double epsilon = 1.0;    // forward-pass step scaling in (0, 1]
    double epsilon1 = 1e-4;  // convergence tolerance on the control change norm
    int max_iterations = 50;
    int max_eps_halvings = 4;
    double convexity_floor = 1e-8;
    double stencil_hx = 0.5;   // escape-fit stencil half-steps
    double stencil_hv = 0.25;
};

/// Quadratic fit p1 dx^2 + p2 dv^2 + p3 dx dv + p4 dx + p5 dv + p6 of the
/// escape cost around a nominal state.
struct EscapeQuadFit {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0, p5 = 0, p6 = 0;

    Eigen::Matrix2d hessian() const {
        Eigen::Matrix2d h;
        h << 2.0 * p1, p3, p3, 2.0 * p2;
        return h;
    }
    Eigen::Vector2d gradient() const { return {p4, p5}; }
};

/// Coefficients of the stagewise quadratic model
///   Q(dx, da) = 1/2 dx'A dx + dx'B da + 1/2 C da^2 + D da + E'dx.
struct QuadraticStageModel {
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d B = Eigen::Vector2d::Zero();
    double C = 0.0;
    double D = 0.0;
    Eigen::Vector2d E = Eigen::Vector2d::Zero();
};

/// Linear stage feedback da(dx) = alpha + beta dx.
struct FeedbackGain {
    double alpha = 0.0;
    Eigen::RowVector2d beta = Eigen::RowVector2d::Zero();
    bool clamped = false;
};

struct DdpIterationRow {
    int iteration = 0;
    double cost = 0.0;
    double epsilon_used = 0.0;
    double control_change_norm = 0.0;
    int clamp_events = 0;
    int convexity_projections = 0;
};

struct DdpSolution {
    Trajectory trajectory;
    std::vector<DdpIterationRow> log;
    bool converged = false;
    int iterations = 0;
    double solve_seconds = 0.0;
};

/// Distance-weighted least-squares quadratic fit of the escape cost on a
/// 3x3 stencil around `center` (tricube weights, bandwidth twice the corner
/// distance). Exactly recovers quadratics. The speed offsets are shifted
/// one-sided where the stencil would leave [v_lo, v_hi]: the vehicle cannot
/// be there, and sampling across the speed bounds corrupts the fitted
/// curvature. If the normal equations are rank deficient the stencil is
/// doubled once.
inline EscapeQuadFit fit_quadratic_escape(VehicleState center, const EscapeModel& escape,
                                          double hx, double hv, double v_lo = -1e300,
                                          double v_hi = 1e300) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double sx = hx * (attempt + 1), sv = hv * (attempt + 1);
        double shift = 0.0;
        if (center.v - sv < v_lo) shift = v_lo - (center.v - sv);
        if (center.v + sv + shift > v_hi) shift = v_hi - (center.v + sv);
        Eigen::Matrix<double, 9, 6> X;
        Eigen::Matrix<double, 9, 1> y;
        Eigen::Matrix<double, 9, 1> wts;
        int r = 0;
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j, ++r) {
                const double dx = i * sx;
                const double dv = j * sv + shift;
                X.row(r) << dx * dx, dv * dv, dx * dv, dx, dv, 1.0;
                y(r) = escape.cost(center.x + dx, center.v + dv);
                const double u =
                    std::hypot(dx / sx, dv / sv) / (2.0 * std::sqrt(2.0) + std::abs(shift) / sv);
                wts(r) = std::pow(1.0 - u * u * u, 3);
            }
        }
        const Eigen::Matrix<double, 6, 6> N = X.transpose() * wts.asDiagonal() * X;
        const Eigen::Matrix<double, 6, 1> b = X.transpose() * (wts.asDiagonal() * y);
        Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(N);
        if (lu.rank() < 6) continue;
        const Eigen::Matrix<double, 6, 1> p = lu.solve(b);
        return {p(0), p(1), p(2), p(3), p(4), p(5)};
    }
    throw std::runtime_error("fit_quadratic_escape: rank-deficient stencil after enlargement");
}

namespace detail {

/// Tightest per-side bounds on da at the nominal point, from the state box
/// pushed through the dynamics plus the control box itself.
inline void stage_da_box(const Scenario& sc, const VehicleState& next_nominal, double a_nominal,
                         double& lb, double& ub) {
    const double T = sc.T;
    ub = std::min({2.0 * (sc.x_upper() - next_nominal.x) / (T * T),
                   (sc.bounds.v_max - next_nominal.v) / T, sc.bounds.a_max - a_nominal});
    lb = std::max({2.0 * (sc.bounds.x_min - next_nominal.x) / (T * T),
                   (sc.bounds.v_min - next_nominal.v) / T, sc.bounds.a_min - a_nominal});
}

/// Row of the activated constraint's state sensitivity: holding the active
/// inequality at equality determines da as a linear function of dx.
inline Eigen::RowVector2d active_row(const Scenario& sc, const VehicleState& next_nominal,
                                     double a_nominal, double bound) {
    const double T = sc.T;
    if (std::abs(bound - (sc.bounds.a_max - a_nominal)) < 1e-12 ||
        std::abs(bound - (sc.bounds.a_min - a_nominal)) < 1e-12)
        return Eigen::RowVector2d::Zero();
    if (std::abs(bound - (sc.bounds.v_max - next_nominal.v) / T) < 1e-12 ||
        std::abs(bound - (sc.bounds.v_min - next_nominal.v) / T) < 1e-12)
        return Eigen::RowVector2d(0.0, -1.0 / T);
    return Eigen::RowVector2d(-2.0 / (T * T), -2.0 / T);
}

}  // namespace detail

struct BackwardPassResult {
    std::vector<FeedbackGain> gains;
    std::vector<QuadraticStageModel> stage_models;  // Q at each stage (diagnostics)
    int convexity_projections = 0;
};

/// Backward sweep: per stage, compose the quadratic escape fit and the stored
/// quadratic cost-to-go with the (exactly linear) dynamics, solve the scalar
/// box QP at dx = 0, and re-introduce dx through the active constraint to get
/// the stage feedback law. The updated cost-to-go Q(dx, alpha + beta dx)
/// stays quadratic.
inline BackwardPassResult backward_pass(const Trajectory& nominal, const Scenario& sc,
                                        const EscapeModel& escape, const DdpParams& params) {
    const int K = sc.horizon();
    if (int(nominal.horizon()) < K)
        throw std::invalid_argument("backward_pass: nominal shorter than the horizon");
    const double T = sc.T;
    Eigen::Matrix2d F;
    F << 1.0, T, 0.0, 1.0;
    const Eigen::Vector2d G(0.5 * T * T, T);

    BackwardPassResult out;
    out.gains.resize(K);
    out.stage_models.resize(K);

    Eigen::Matrix2d Av = Eigen::Matrix2d::Zero();  // value quadratic at k+1
    Eigen::Vector2d Ev = Eigen::Vector2d::Zero();
    for (int k = K - 1; k >= 0; --k) {
        const double p = sc.prior.switch_probability(k);
        const double q = 1.0 - p;
        const VehicleState next = nominal.states[k + 1];
        const double abar = nominal.controls[k];

        QuadraticStageModel m;
        m.C = 1.0;      // stage cost (1/2)(abar + da)^2
        m.D = abar;
        if (p > 0.0) {
            // The fitted surface may be mildly indefinite; only the scalar
            // control curvature C must stay positive for the stage QP, so the
            // Hessian enters the composition as fitted and C is floored below.
            EscapeQuadFit fit = fit_quadratic_escape(next, escape, params.stencil_hx,
                                                     params.stencil_hv, sc.bounds.v_min,
                                                     sc.bounds.v_max);
            const Eigen::Matrix2d H = fit.hessian();
            const Eigen::Vector2d g = fit.gradient();
            m.A += p * (F.transpose() * H * F);
            m.B += p * (F.transpose() * H * G);
            m.C += p * (G.transpose() * H * G).value();
            m.D += p * G.dot(g);
            m.E += p * (F.transpose() * g);
        }
        m.A += q * (F.transpose() * Av * F);
        m.B += q * (F.transpose() * Av * G);
        m.C += q * (G.transpose() * Av * G).value();
        m.D += q * G.dot(Ev);
        m.E += q * (F.transpose() * Ev);
        if (m.C < params.convexity_floor) {
            m.C = params.convexity_floor;
            ++out.convexity_projections;
        }

        double lb, ub;
        detail::stage_da_box(sc, next, abar, lb, ub);
        FeedbackGain gain;
        double da = -m.D / m.C;
        if (da >= lb && da <= ub) {
            gain.beta = -m.B.transpose() / m.C;
        } else {
            const double bound = da > ub ? ub : lb;
            da = bound;
            gain.clamped = true;
            gain.beta = detail::active_row(sc, next, abar, bound);
        }
        gain.alpha = da;

        // V(dx, k) = Q(dx, alpha + beta dx), coefficients around nominal[k]
        const Eigen::Matrix2d bb = gain.beta.transpose() * gain.beta;
        const Eigen::Matrix2d Bb = m.B * gain.beta;
        Av = m.A + Bb + Bb.transpose() + m.C * bb;
        Ev = m.E + gain.alpha * m.B + (m.C * gain.alpha + m.D) * gain.beta.transpose();

        out.gains[k] = gain;
        out.stage_models[k] = m;
    }
    return out;
}

struct ForwardPassResult {
    Trajectory trajectory;
    int clamp_events = 0;
};

/// Roll out a(k) = abar(k) + eps (alpha + beta dx), clamped to the feasible
/// box evaluated at the realized state; cost is the exact expected cost with
/// the true escape (not the fit).
inline ForwardPassResult forward_pass(const Trajectory& nominal, const BackwardPassResult& bp,
                                      double eps, const Scenario& sc, const EscapeModel& escape) {
    const int K = sc.horizon();
    const double T = sc.T;
    ForwardPassResult out;
    Trajectory& traj = out.trajectory;
    traj.states.push_back(sc.initial());
    traj.controls.reserve(K);
    for (int k = 0; k < K; ++k) {
        const VehicleState cur = traj.states.back();
        const Eigen::Vector2d dx(cur.x - nominal.states[k].x, cur.v - nominal.states[k].v);
        double a =
            nominal.controls[k] + eps * (bp.gains[k].alpha + (bp.gains[k].beta * dx).value());
        const double ub = std::min({2.0 * (sc.x_upper() - cur.x - cur.v * T) / (T * T),
                                    (sc.bounds.v_max - cur.v) / T, sc.bounds.a_max});
        const double lb = std::max({2.0 * (sc.bounds.x_min - cur.x - cur.v * T) / (T * T),
                                    (sc.bounds.v_min - cur.v) / T, sc.bounds.a_min});
        if (a < lb || a > ub) {
            a = std::min(std::max(a, lb), ub);
            ++out.clamp_events;
        }
        traj.controls.push_back(a);
        traj.states.push_back(step_kinematics(cur, a, T));
    }
    traj.cost = expected_trajectory_cost(
        traj, sc.prior, [&](double x, double v) { return escape.cost(x, v); });
    return out;
}

/// DDP iterations from a caller-supplied nominal trajectory (used by the MPC
/// loop to warm-start from the shifted previous solution).
inline DdpSolution solve_ddp_from(Trajectory nominal, const Scenario& sc,
                                  const DdpParams& params) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const EscapeModel escape(sc);
    nominal.cost = expected_trajectory_cost(
        nominal, sc.prior, [&](double x, double v) { return escape.cost(x, v); });

    DdpSolution sol;
    for (int it = 1; it <= params.max_iterations; ++it) {
        const BackwardPassResult bp = backward_pass(nominal, sc, escape, params);
        double eps = params.epsilon;
        ForwardPassResult best = forward_pass(nominal, bp, eps, sc, escape);
        double eps_used = eps;
        for (int h = 0; h < params.max_eps_halvings && best.trajectory.cost > nominal.cost; ++h) {
            eps *= 0.5;
            ForwardPassResult retry = forward_pass(nominal, bp, eps, sc, escape);
            if (retry.trajectory.cost < best.trajectory.cost) {
                best = std::move(retry);
                eps_used = eps;
            }
        }
        // accept the best attempt only if it beats the incumbent; otherwise
        // the incumbent is kept and the convergence test fires on the
        // zero-length step
        if (best.trajectory.cost > nominal.cost) {
            best.trajectory = nominal;
            best.clamp_events = 0;
            eps_used = 0.0;
        }
        double norm2 = 0.0;
        for (std::size_t k = 0; k < best.trajectory.controls.size(); ++k) {
            const double d = best.trajectory.controls[k] - nominal.controls[k];
            norm2 += d * d;
        }
        const double norm = std::sqrt(norm2);
        sol.log.push_back({it, best.trajectory.cost, eps_used, norm, best.clamp_events,
                           bp.convexity_projections});
        nominal = std::move(best.trajectory);
        if (norm < params.epsilon1) {
            sol.converged = true;
            break;
        }
    }
    sol.trajectory = std::move(nominal);
    sol.iterations = int(sol.log.size());
    sol.solve_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return sol;
}

/// Constrained DDP from the pessimistic deterministic initializer (green at
/// the latest possible step), sampled at T with controls recovered from the
/// speed differences.
inline DdpSolution solve_ddp(const Scenario& sc, const DdpParams& params) {
    DeterministicSolution pess = constrained_glosa(sc, sc.horizon() * sc.T);
    const int K = sc.horizon();
    Trajectory init;
    init.states.push_back(sc.initial());
    for (int k = 0; k < K; ++k) {
        const double v_next = pess.state_at((k + 1) * sc.T).v;
        double a = (v_next - init.states.back().v) / sc.T;
        a = std::min(std::max(a, sc.bounds.a_min), sc.bounds.a_max);
        init.controls.push_back(a);
        init.states.push_back(step_kinematics(init.states.back(), a, sc.T));
    }
    return solve_ddp_from(std::move(init), sc, params);
}

}  // namespace glosa
