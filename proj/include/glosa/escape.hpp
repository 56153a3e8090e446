#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "glosa/cubic.hpp"
#include "glosa/scenario.hpp"
#include "glosa/types.hpp"

namespace glosa {

/// Cost-to-go once the light is green. The post-switch arc is the free-time
/// arc from the current state to the fixed final state whose horizon te
/// minimizes w*te + integral a^2 dt; the cost charged to the stochastic
/// problem is the energy part (1/2) integral a^2 of that arc (the elapsed and
/// remaining time are not billed to the pre-switch policy). Equivalently the
/// horizon minimizes (w/2)*te + E(te) with E the half-integral energy.
class EscapeModel {
  public:
    EscapeModel() = default;
    explicit EscapeModel(const Scenario& sc) : xe_(sc.xe), ve_(sc.ve), w_half_(0.5 * sc.w) {}
    EscapeModel(double xe, double ve, double w) : xe_(xe), ve_(ve), w_half_(0.5 * w) {}

    struct Arc {
        double te = 0.0;
        double energy = 0.0;
    };

    /// Stationary horizon and energy of the post-switch arc. The stationarity
    /// condition of (w/2)*te + E(te) multiplied by te^4 is the quartic
    ///   (w/2) te^4 - (6 v dv + 2 dv^2 + 6 v^2) te^2 + 12 D (dv + 2 v) te - 18 D^2
    /// with D = xe - x, dv = ve - v; its sign-change brackets are scanned
    /// geometrically and polished by safeguarded Newton.
    Arc solve(double x, double v) const {
        const double D = xe_ - x;
        const double dv = ve_ - v;
        const double a2 = -(6.0 * v * dv + 2.0 * dv * dv + 6.0 * v * v);
        const double a1 = 12.0 * dv * D + 24.0 * v * D;
        const double a0 = -18.0 * D * D;
        if (a0 == 0.0 && a2 == 0.0) return {0.0, 0.0};  // already at the goal, at matching speed

        const auto q = [&](double te) {
            return ((w_half_ * te * te + a2) * te + a1) * te + a0;
        };
        const auto dq = [&](double te) { return (4.0 * w_half_ * te * te + 2.0 * a2) * te + a1; };

        Arc best{0.0, 0.0};
        double best_obj = 0.0;
        bool found = false;
        double prev_t = 1.0 / 64.0;
        double prev_q = q(prev_t);
        for (double t = 1.0 / 32.0; t <= 4096.0; t *= 2.0) {
            const double qt = q(t);
            if (prev_q < 0.0 && qt >= 0.0) {
                const double te = refine_root(q, dq, prev_t, t);
                const double e = min_energy_cost(x, v, xe_, ve_, te);
                const double obj = w_half_ * te + e;
                if (!found || obj < best_obj) {
                    best = {te, e};
                    best_obj = obj;
                    found = true;
                }
            }
            prev_t = t;
            prev_q = qt;
        }
        if (!found) {
            // objective is increasing over the whole scan range: the energy
            // term vanishes as te -> 0 only in the handled degenerate case,
            // so fall back to the left edge.
            const double te = 1.0 / 64.0;
            return {te, min_energy_cost(x, v, xe_, ve_, te)};
        }
        return best;
    }

    double cost(double x, double v) const { return solve(x, v).energy; }
    double cost(VehicleState s) const { return solve(s.x, s.v).energy; }

    /// The full post-switch arc, for rolling the vehicle out after switching.
    CubicSegment arc(VehicleState s) const {
        const Arc a = solve(s.x, s.v);
        if (a.te <= 0.0) return CubicSegment{s.x, s.v, 0.0, 0.0, 0.0};
        return CubicSegment::between(s, {xe_, ve_}, a.te);
    }

    double xe() const { return xe_; }
    double ve() const { return ve_; }

  private:
    template <class Q, class DQ>
    static double refine_root(const Q& q, const DQ& dq, double lo, double hi) {
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double ft = q(t);
            (ft < 0.0 ? lo : hi) = t;
            const double dft = dq(t);
            double next = dft != 0.0 ? t - ft / dft : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) < 1e-13 * (1.0 + t)) return next;
            t = next;
        }
        return t;
    }

    double xe_ = 0.0, ve_ = 0.0, w_half_ = 0.05;
};

/// Optimal post-switch cost from `state`; independent of the switching step
/// because only the remaining problem matters.
inline double escape_cost(VehicleState state, const Scenario& sc) {
    return EscapeModel(sc).cost(state);
}

/// Dense escape memo over a node lattice, for solvers whose queries are grid
/// states. Halving the discretization maps old nodes onto even indices of
/// the refined lattice, so the memo is rebased instead of recomputed.
/// Off-node queries fall through to direct evaluation.
class EscapeGridMemo {
  public:
    EscapeGridMemo(EscapeModel model, int nx, int nv, double x0, double v0, double dx, double dv)
        : model_(model), nx_(nx), nv_(nv), x0_(x0), v0_(v0), dx_(dx), dv_(dv),
          values_(std::size_t(nx) * std::size_t(nv),
                  -std::numeric_limits<double>::quiet_NaN()) {}

    double at_node(int ix, int iv) {
        double& slot = values_[std::size_t(iv) * nx_ + ix];
        if (std::isnan(slot)) {
            slot = model_.cost(x0_ + ix * dx_, v0_ + iv * dv_);
            ++misses_;
        }
        return slot;
    }

    double operator()(double x, double v) {
        const auto ix = std::llround((x - x0_) / dx_);
        const auto iv = std::llround((v - v0_) / dv_);
        if (ix >= 0 && ix < nx_ && iv >= 0 && iv < nv_ &&
            std::abs(x0_ + ix * dx_ - x) <= 1e-9 && std::abs(v0_ + iv * dv_ - v) <= 1e-9)
            return at_node(int(ix), int(iv));
        ++misses_;
        return model_.cost(x, v);
    }

    /// Rebase onto a lattice with intervals halved (twice the node density).
    void halve(int new_nx, int new_nv) {
        std::vector<double> next(std::size_t(new_nx) * std::size_t(new_nv),
                                 -std::numeric_limits<double>::quiet_NaN());
        for (int iv = 0; iv < nv_; ++iv) {
            if (2 * iv >= new_nv) break;
            for (int ix = 0; ix < nx_; ++ix) {
                if (2 * ix >= new_nx) break;
                next[std::size_t(2 * iv) * new_nx + 2 * ix] = values_[std::size_t(iv) * nx_ + ix];
            }
        }
        values_ = std::move(next);
        nx_ = new_nx;
        nv_ = new_nv;
        dx_ *= 0.5;
        dv_ *= 0.5;
    }

    std::size_t misses() const { return misses_; }

  private:
    EscapeModel model_;
    int nx_ = 0, nv_ = 0;
    double x0_ = 0, v0_ = 0, dx_ = 1, dv_ = 1;
    std::vector<double> values_;
    std::size_t misses_ = 0;
};

/// Memoized escape costs keyed on quantized (x, v). Grid node coordinates are
/// exact dyadics, so quantization at 2^-20 is collision-free for any sane
/// discretization and identical states always map to one key.
class EscapeCache {
  public:
    explicit EscapeCache(EscapeModel model) : model_(model) {}

    double operator()(double x, double v) {
        ++lookups_;
        const uint64_t key = pack(x, v);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        ++misses_;
        const double e = model_.cost(x, v);
        table_.emplace(key, e);
        return e;
    }

    const EscapeModel& model() const { return model_; }
    std::size_t lookups() const { return lookups_; }
    std::size_t misses() const { return misses_; }
    void clear() {
        table_.clear();
        lookups_ = misses_ = 0;
    }

  private:
    static uint64_t pack(double x, double v) {
        const auto qx = int64_t(std::llround(x * 1048576.0));
        const auto qv = int64_t(std::llround(v * 1048576.0));
        return (uint64_t(uint32_t(int32_t(qx))) << 32) | uint64_t(uint32_t(int32_t(qv)));
    }

    EscapeModel model_;
    std::unordered_map<uint64_t, double> table_;
    std::size_t lookups_ = 0, misses_ = 0;
};

}  // namespace glosa
