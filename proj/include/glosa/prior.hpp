#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace glosa {

/// Discrete a-priori distribution of the signal switching step k1 over
/// [k_min, k_max]. probs[i] is P(k1 = k_min + i).
///
/// The conditional no-switch update ("crop-and-scale") is evaluated from
/// cached suffix sums of the original masses rather than a telescoping
/// product, so repeated conditioning does not accumulate drift.
class SwitchingPrior {
  public:
    SwitchingPrior() = default;

    SwitchingPrior(int k_min, std::vector<double> probs) : k_min_(k_min), probs_(std::move(probs)) {
        if (k_min_ < 1) throw std::invalid_argument("SwitchingPrior: k_min must be >= 1");
        if (probs_.empty()) throw std::invalid_argument("SwitchingPrior: empty distribution");
        for (double p : probs_)
            if (!(p >= 0.0)) throw std::invalid_argument("SwitchingPrior: P(k) must be >= 0");
        // trim zero tails so that P(k_max) > 0 and P(k_min) > 0
        while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
        while (probs_.size() > 1 && probs_.front() == 0.0) {
            probs_.erase(probs_.begin());
            ++k_min_;
        }
        double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
        if (sum <= 0.0) throw std::invalid_argument("SwitchingPrior: total mass is zero");
        if (std::abs(sum - 1.0) > 1e-12)
            for (double& p : probs_) p /= sum;
        rebuild_suffix();
    }

    static SwitchingPrior uniform(int k_min, int k_max) {
        if (k_max < k_min) throw std::invalid_argument("SwitchingPrior: k_max < k_min");
        return SwitchingPrior(k_min, std::vector<double>(k_max - k_min + 1,
                                                         1.0 / double(k_max - k_min + 1)));
    }

    int k_min() const { return k_min_; }
    int k_max() const { return k_min_ + int(probs_.size()) - 1; }

    /// P(k1 = k); zero outside the window.
    double mass(int k) const {
        if (k < k_min_ || k > k_max()) return 0.0;
        return probs_[k - k_min_];
    }

    const std::vector<double>& probs() const { return probs_; }

    /// p(0|k): probability that the light switches at step k+1 given that it
    /// has not switched up to step k. Defined for 0 <= k <= k_max-1; the
    /// crop-and-scale ratio applies from k = k_min - 1 so that the switching
    /// process realizes k1 = k_min with probability P(k_min).
    double switch_probability(int k) const {
        if (k < 0 || k >= k_max())
            throw std::out_of_range("switch_probability: step outside the switching window");
        if (k < k_min_ - 1) return 0.0;
        return probs_[k + 1 - k_min_] / suffix_[k + 1 - k_min_];
    }

    /// Prior restricted to k1 > k_now, renormalized. Identity below k_min.
    SwitchingPrior conditioned(int k_now) const {
        if (k_now >= k_max())
            throw std::out_of_range("conditioned: switching window exhausted (k_now >= k_max)");
        if (k_now < k_min_) return *this;
        std::vector<double> rest(probs_.begin() + (k_now + 1 - k_min_), probs_.end());
        return SwitchingPrior(k_now + 1, std::move(rest));
    }

    /// Same distribution re-indexed so that step `origin` becomes step 0.
    SwitchingPrior shifted(int origin) const {
        if (k_min_ - origin < 1)
            throw std::invalid_argument("shifted: support would start below step 1");
        return SwitchingPrior(k_min_ - origin, probs_);
    }

  private:
    void rebuild_suffix() {
        suffix_.assign(probs_.size(), 0.0);
        double acc = 0.0;
        for (int i = int(probs_.size()) - 1; i >= 0; --i) {
            acc += probs_[i];
            suffix_[i] = acc;
        }
    }

    int k_min_ = 1;
    std::vector<double> probs_;
    std::vector<double> suffix_;  // suffix_[i] = sum of probs_[i..]
};

}  // namespace glosa
