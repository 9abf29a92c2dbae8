#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "casq/steady_state.hpp"

namespace casq {

// The normally-ordered noise of the gain medium plus squeezed reservoir has
// symmetric correlations <f f> = eps - 2 cal_d and <f f*> = 2 cal_a; the
// reservoir alone contributes kappa M and kappa N of those weights.
struct DiffusionSpec {
    double d_ff = 0.0;
    double d_ffstar = 0.0;
    double reservoir_ff = 0.0;      // kappa M
    double reservoir_ffstar = 0.0;  // kappa N
    double gain_ff = 0.0;           // d_ff - kappa M
    double gain_ffstar = 0.0;       // d_ffstar - kappa N
};

inline DiffusionSpec diffusion_spec(const SystemParams& p) {
    const DerivedCoefficients c = derive_coefficients(p);
    DiffusionSpec d;
    d.d_ff = p.epsilon - 2.0 * c.cal_d;
    d.d_ffstar = 2.0 * c.cal_a;
    d.reservoir_ff = p.kappa * c.res_m;
    d.reservoir_ffstar = p.kappa * c.res_n;
    d.gain_ff = d.d_ff - d.reservoir_ff;
    d.gain_ffstar = d.d_ffstar - d.reservoir_ffstar;
    return d;
}

// Complex factor L of the symmetric diffusion matrix C in the doubled basis
// (alpha, alpha_c): C11 = C22 = d_ff, C12 = C21 = d_ffstar, L L^T = C. C has
// fixed eigenvectors (1,±1)/sqrt(2), so the factor is closed-form; negative
// eigenvalues (the squeezed directions) give imaginary columns.
struct DiffusionFactor {
    std::complex<double> l11, l12, l21, l22;
    double residual = 0.0; // max |(L L^T - C)_{ij}|
};

inline DiffusionFactor build_diffusion_factor(const SystemParams& p) {
    const DiffusionSpec d = diffusion_spec(p);
    auto csqrt = [](double x) {
        return x >= 0.0 ? std::complex<double>(std::sqrt(x), 0.0)
                        : std::complex<double>(0.0, std::sqrt(-x));
    };
    const std::complex<double> u = csqrt(d.d_ff + d.d_ffstar);
    const std::complex<double> v = csqrt(d.d_ff - d.d_ffstar);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    DiffusionFactor f;
    f.l11 = u * inv_rt2;
    f.l12 = v * inv_rt2;
    f.l21 = u * inv_rt2;
    f.l22 = -v * inv_rt2;
    const std::complex<double> c11 = f.l11 * f.l11 + f.l12 * f.l12;
    const std::complex<double> c12 = f.l11 * f.l21 + f.l12 * f.l22;
    const std::complex<double> c22 = f.l21 * f.l21 + f.l22 * f.l22;
    f.residual = std::max({std::abs(c11 - d.d_ff), std::abs(c12 - d.d_ffstar),
                           std::abs(c22 - d.d_ff)});
    return f;
}

// Diagnoses whether a single complex field with independent real noises on
// its two quadratures could reproduce the correlations: f = x + iy requires
// <x^2> = (2 cal_a + d_ff)/2 and <y^2> = (2 cal_a - d_ff)/2 both >= 0, and
// likewise for the reservoir pair kappa(N±M)/2. A squeezed reservoir makes
// kappa(N-M) < 0, which is what forces the doubled phase space.
struct RepresentabilityReport {
    double total_x_var = 0.0;
    double total_y_var = 0.0;
    double reservoir_major = 0.0; // kappa (N+M)/2
    double reservoir_minor = 0.0; // kappa (N-M)/2
    bool representable = true;
};

inline RepresentabilityReport classical_representability(const SystemParams& p) {
    const DiffusionSpec d = diffusion_spec(p);
    const DerivedCoefficients c = derive_coefficients(p);
    RepresentabilityReport r;
    r.total_x_var = (d.d_ffstar + d.d_ff) / 2.0;
    r.total_y_var = (d.d_ffstar - d.d_ff) / 2.0;
    r.reservoir_major = p.kappa * (c.res_n + c.res_m) / 2.0;
    r.reservoir_minor = p.kappa * (c.res_n - c.res_m) / 2.0;
    r.representable = r.total_x_var >= 0.0 && r.total_y_var >= 0.0 &&
                      r.reservoir_major >= 0.0 && r.reservoir_minor >= 0.0;
    return r;
}

// Euler-Maruyama stepper for the doubled pair. alpha_c plays the role of
// alpha* but evolves as an independent complex field; the symmetric noise
// correlations are carried entirely by L.
struct LangevinStepper {
    double drift_b = 0.0; // cal_b - cal_a
    double drift_c = 0.0; // cal_c - cal_d + epsilon
    DiffusionFactor factor;

    void step(std::complex<double>& a, std::complex<double>& ac, double dt, double xi1,
              double xi2) const {
        const double sdt = std::sqrt(dt);
        const std::complex<double> g1 = (factor.l11 * xi1 + factor.l12 * xi2) * sdt;
        const std::complex<double> g2 = (factor.l21 * xi1 + factor.l22 * xi2) * sdt;
        const std::complex<double> da = (-drift_b * a + drift_c * ac) * dt + g1;
        const std::complex<double> dac = (-drift_b * ac + drift_c * a) * dt + g2;
        a += da;
        ac += dac;
    }
};

inline LangevinStepper make_stepper(const SystemParams& p) {
    const DerivedCoefficients c = derive_coefficients(p);
    return LangevinStepper{c.cal_b - c.cal_a, c.cal_c - c.cal_d + p.epsilon,
                           build_diffusion_factor(p)};
}

inline double default_langevin_dt(const SystemParams& p) {
    return 1e-3 / lambda_plus_of(p);
}

// splitmix64: decorrelates per-trajectory substreams from (seed, index).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct StatEstimate {
    std::complex<double> mean{0.0, 0.0};
    double se_re = 0.0;
    double se_im = 0.0;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<StatEstimate> mean_alpha;     // <alpha>
    std::vector<StatEstimate> alpha_sq;       // <alpha^2>
    std::vector<StatEstimate> alpha_c_sq;     // <alpha_c^2>, estimates <alpha*^2>
    std::vector<StatEstimate> cross_n;        // <alpha_c alpha>, estimates <alpha* alpha>
    std::vector<StatEstimate> quad_plus_sq;   // <(alpha_c + alpha)^2>
    std::vector<StatEstimate> quad_minus_sq;  // <(alpha_c - alpha)^2>
    int n_traj = 0;
    std::uint64_t seed = 0;
};

namespace detail {

constexpr int kStatsPerSample = 6;
constexpr int kTrajBlock = 64;

struct BlockSums {
    // per (time sample, statistic): sum, sum of re^2, sum of im^2
    std::vector<std::complex<double>> sum;
    std::vector<double> sum_re2;
    std::vector<double> sum_im2;
    long count = 0;

    explicit BlockSums(std::size_t n = 0)
        : sum(n, {0.0, 0.0}), sum_re2(n, 0.0), sum_im2(n, 0.0) {}

    void add(std::size_t slot, std::complex<double> v) {
        sum[slot] += v;
        sum_re2[slot] += v.real() * v.real();
        sum_im2[slot] += v.imag() * v.imag();
    }
    void merge(const BlockSums& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sum_re2[i] += o.sum_re2[i];
            sum_im2[i] += o.sum_im2[i];
        }
        count += o.count;
    }
};

// Fixed pairwise reduction over trajectory blocks: the result depends only on
// block boundaries, not on which worker computed which block.
inline BlockSums pairwise_reduce(std::vector<BlockSums>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockSums left = pairwise_reduce(blocks, lo, mid);
    const BlockSums right = pairwise_reduce(blocks, mid, hi);
    left.merge(right);
    return left;
}

inline StatEstimate finalize(const BlockSums& total, std::size_t slot) {
    const double n = static_cast<double>(total.count);
    StatEstimate e;
    e.mean = total.sum[slot] / n;
    if (total.count > 1) {
        const double var_re =
            std::max(0.0, (total.sum_re2[slot] - n * e.mean.real() * e.mean.real()) / (n - 1.0));
        const double var_im =
            std::max(0.0, (total.sum_im2[slot] - n * e.mean.imag() * e.mean.imag()) / (n - 1.0));
        e.se_re = std::sqrt(var_re / n);
        e.se_im = std::sqrt(var_im / n);
    }
    return e;
}

} // namespace detail

// Ensemble Monte Carlo of the doubled-phase-space Langevin dynamics from
// vacuum. Results are bit-identical for a given (seed, n_traj, grid) however
// the trajectory blocks are scheduled across threads.
inline EnsembleStats simulate_ensemble(const SystemParams& p, int n_traj, double t_end, double dt,
                                       std::uint64_t seed, int n_samples = 41,
                                       int n_threads = 1) {
    if (n_traj < 2) throw std::domain_error("need at least 2 trajectories");
    if (!(dt > 0.0) || !(t_end > 0.0)) throw std::domain_error("dt and t_end must be > 0");
    if (stability_classify(p) == Stability::above)
        throw stability_error("ensemble statistics require operation at or below threshold");
    if (n_samples < 2) n_samples = 2;

    const LangevinStepper stepper = make_stepper(p);
    const long steps = std::max<long>(1, static_cast<long>(std::llround(t_end / dt)));
    // sample indices, always including t = 0 and the final step
    std::vector<long> sample_steps(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
        sample_steps[static_cast<std::size_t>(i)] =
            static_cast<long>(std::llround(static_cast<double>(steps) * i / (n_samples - 1)));

    const std::size_t slots = sample_steps.size() * detail::kStatsPerSample;
    const int n_blocks = (n_traj + detail::kTrajBlock - 1) / detail::kTrajBlock;
    std::vector<detail::BlockSums> blocks(static_cast<std::size_t>(n_blocks),
                                          detail::BlockSums(slots));

    auto run_block = [&](int bi) {
        detail::BlockSums& bs = blocks[static_cast<std::size_t>(bi)];
        const int t0 = bi * detail::kTrajBlock;
        const int t1 = std::min(n_traj, t0 + detail::kTrajBlock);
        for (int traj = t0; traj < t1; ++traj) {
            std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(traj)));
            std::normal_distribution<double> normal(0.0, 1.0);
            std::complex<double> a{0.0, 0.0}, ac{0.0, 0.0};
            std::size_t next_sample = 0;
            for (long k = 0; k <= steps; ++k) {
                if (next_sample < sample_steps.size() && k == sample_steps[next_sample]) {
                    const std::size_t base = next_sample * detail::kStatsPerSample;
                    const std::complex<double> qp = (ac + a) * (ac + a);
                    const std::complex<double> qm = (ac - a) * (ac - a);
                    bs.add(base + 0, a);
                    bs.add(base + 1, a * a);
                    bs.add(base + 2, ac * ac);
                    bs.add(base + 3, ac * a);
                    bs.add(base + 4, qp);
                    bs.add(base + 5, qm);
                    ++next_sample;
                }
                if (k < steps) stepper.step(a, ac, dt, normal(rng), normal(rng));
            }
            ++bs.count;
        }
    };

    if (n_threads <= 1) {
        for (int bi = 0; bi < n_blocks; ++bi) run_block(bi);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int workers = std::min(n_threads, n_blocks);
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int bi = next.fetch_add(1); bi < n_blocks; bi = next.fetch_add(1))
                    run_block(bi);
            });
        for (auto& th : pool) th.join();
    }

    const detail::BlockSums total =
        detail::pairwise_reduce(blocks, 0, static_cast<std::size_t>(n_blocks));

    EnsembleStats out;
    out.n_traj = n_traj;
    out.seed = seed;
    out.times.reserve(sample_steps.size());
    for (std::size_t i = 0; i < sample_steps.size(); ++i) {
        out.times.push_back(static_cast<double>(sample_steps[i]) * dt);
        const std::size_t base = i * detail::kStatsPerSample;
        out.mean_alpha.push_back(detail::finalize(total, base + 0));
        out.alpha_sq.push_back(detail::finalize(total, base + 1));
        out.alpha_c_sq.push_back(detail::finalize(total, base + 2));
        out.cross_n.push_back(detail::finalize(total, base + 3));
        out.quad_plus_sq.push_back(detail::finalize(total, base + 4));
        out.quad_minus_sq.push_back(detail::finalize(total, base + 5));
    }
    return out;
}

struct McCorrelationOptions {
    int n_traj = 2000;
    double dt = 0.0;            // 0 = default
    double burn_in = 0.0;       // 0 = 12 / lambda_minus; must be >= 10 / lambda_minus
    int n_origins = 16;         // time origins per trajectory (time averaging)
    double origin_spacing = 0.0; // 0 = 2 / lambda_minus
    std::uint64_t seed = 1;
};

struct CorrelationEstimate {
    double tau = 0.0;
    std::complex<double> mean{0.0, 0.0};
    double se_re = 0.0;
    double se_im = 0.0;
};

// Estimates the stationary two-time product <alpha_c(t) alpha(t+tau)> by
// time-and-ensemble averaging; tau values are snapped to step multiples and
// the snapped grid is reported back.
inline std::vector<CorrelationEstimate>
two_time_correlation_mc(const SystemParams& p, std::span<const double> tau_grid,
                        const McCorrelationOptions& opt = {}) {
    if (stability_classify(p) != Stability::below)
        throw stability_error("two-time statistics require operation below threshold");
    if (opt.n_traj < 2) throw std::domain_error("need at least 2 trajectories");
    const DerivedCoefficients c = derive_coefficients(p);
    const double dt = opt.dt > 0.0 ? opt.dt : default_langevin_dt(p);
    const double burn_in = opt.burn_in > 0.0 ? opt.burn_in : 12.0 / c.lambda_minus;
    if (burn_in < 10.0 / c.lambda_minus)
        throw std::invalid_argument("burn-in shorter than 10/lambda_minus; steady state not reached");
    const double spacing = opt.origin_spacing > 0.0 ? opt.origin_spacing : 2.0 / c.lambda_minus;
    if (opt.n_origins < 1) throw std::domain_error("need at least 1 time origin");

    const LangevinStepper stepper = make_stepper(p);
    const long burn_steps = static_cast<long>(std::llround(burn_in / dt));
    const long spacing_steps = std::max<long>(1, static_cast<long>(std::llround(spacing / dt)));
    std::vector<long> tau_steps;
    tau_steps.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        if (tau < 0.0) throw std::domain_error("tau must be >= 0");
        tau_steps.push_back(static_cast<long>(std::llround(tau / dt)));
    }
    const long max_tau = tau_steps.empty() ? 0 : *std::max_element(tau_steps.begin(), tau_steps.end());
    const long total_steps =
        burn_steps + spacing_steps * static_cast<long>(opt.n_origins - 1) + max_tau;

    const std::size_t nt = tau_steps.size();
    detail::BlockSums total(nt);
    std::vector<std::complex<double>> per_traj(nt);
    std::vector<std::complex<double>> origin_ac(static_cast<std::size_t>(opt.n_origins));
    std::vector<std::size_t> origin_next(static_cast<std::size_t>(opt.n_origins));

    // tau offsets must be visited in ascending order per origin
    std::vector<std::size_t> order(nt);
    for (std::size_t i = 0; i < nt; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tau_steps[a] < tau_steps[b]; });

    std::vector<detail::BlockSums> blocks;
    blocks.emplace_back(nt);
    detail::BlockSums& bs = blocks[0];
    for (int traj = 0; traj < opt.n_traj; ++traj) {
        std::mt19937_64 rng(substream_seed(opt.seed, static_cast<std::uint64_t>(traj)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::complex<double> a{0.0, 0.0}, ac{0.0, 0.0};
        std::fill(per_traj.begin(), per_traj.end(), std::complex<double>{0.0, 0.0});
        int origins_started = 0;
        for (long k = 0; k <= total_steps; ++k) {
            if (k >= burn_steps && (k - burn_steps) % spacing_steps == 0 &&
                origins_started < opt.n_origins) {
                origin_ac[static_cast<std::size_t>(origins_started)] = ac;
                origin_next[static_cast<std::size_t>(origins_started)] = 0;
                ++origins_started;
            }
            for (int o = 0; o < origins_started; ++o) {
                const long origin_step = burn_steps + static_cast<long>(o) * spacing_steps;
                std::size_t& np = origin_next[static_cast<std::size_t>(o)];
                while (np < nt && origin_step + tau_steps[order[np]] == k) {
                    per_traj[order[np]] += origin_ac[static_cast<std::size_t>(o)] * a;
                    ++np;
                }
            }
            if (k < total_steps) stepper.step(a, ac, dt, normal(rng), normal(rng));
        }
        for (std::size_t i = 0; i < nt; ++i)
            bs.add(i, per_traj[i] / static_cast<double>(opt.n_origins));
        ++bs.count;
    }

    std::vector<CorrelationEstimate> out(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const StatEstimate e = detail::finalize(bs, i);
        out[i] = CorrelationEstimate{static_cast<double>(tau_steps[i]) * dt, e.mean, e.se_re,
                                     e.se_im};
    }
    return out;
}

} // namespace casq
