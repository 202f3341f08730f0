#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "rng.hpp"

namespace lyapinv {

/// A Monte Carlo mean with its standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Streaming mean/variance (Welford), mergeable across workers.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(n_ + o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * static_cast<double>(o.n_) / n;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
        n_ += o.n_;
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

    /// Standard error of the mean for i.i.d. samples.
    Estimate estimate() const {
        return {mean_, n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Standard error from batch means of a (possibly correlated) series.
inline Estimate batch_means(const std::vector<double>& series, std::size_t batches) {
    const std::size_t n = series.size();
    Estimate out;
    out.samples = n;
    if (n == 0) return out;
    double total = 0.0;
    for (double x : series) total += x;
    out.value = total / static_cast<double>(n);
    if (batches > n) batches = n;
    if (batches < 2) return out;
    const std::size_t size = n / batches;
    RunningStats stats;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * size; i < (b + 1) * size; ++i) s += series[i];
        stats.add(s / static_cast<double>(size));
    }
    out.std_error = std::sqrt(stats.variance() / static_cast<double>(batches));
    return out;
}

/// Runs `nsamples` independent draws split over `workers` threads.
///
/// Worker w draws from `rng.substream(w)` and gets a contiguous share of
/// the samples, so the result depends only on (rng identifiers, workers,
/// nsamples). `body(RngStream&, Acc&)` is called once per sample; each
/// worker owns one accumulator built by `make_acc()`. Accumulators are
/// returned in worker order.
template <class Acc, class MakeAcc, class Body>
std::vector<Acc> parallel_samples(std::size_t nsamples, unsigned workers, const RngStream& rng,
                                  MakeAcc make_acc, Body body) {
    if (workers == 0) workers = 1;
    std::vector<Acc> accs;
    accs.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) accs.push_back(make_acc());

    auto run = [&](unsigned w) {
        RngStream local = rng.substream(w);
        const std::size_t begin = nsamples * w / workers;
        const std::size_t end = nsamples * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) body(local, accs[w]);
    };

    if (workers == 1) {
        run(0);
        return accs;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                try {
                    run(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return accs;
}

/// Mean and standard error of `f(rng)` over `nsamples` i.i.d. draws.
template <class F>
Estimate mc_mean(std::size_t nsamples, const RngStream& rng, F f, unsigned workers = 1) {
    auto accs = parallel_samples<RunningStats>(
        nsamples, workers, rng, [] { return RunningStats{}; },
        [&](RngStream& r, RunningStats& acc) { acc.add(f(r)); });
    RunningStats total;
    for (const auto& a : accs) total.merge(a);
    return total.estimate();
}

}  // namespace lyapinv
