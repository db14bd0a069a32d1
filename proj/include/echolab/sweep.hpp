#pragma once

#include "echolab/common.hpp"
#include "echolab/echo.hpp"
#include "echolab/map_family.hpp"
#include "echolab/rng.hpp"
#include "echolab/symbolic.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace echolab {

/// Grid sweep over (m0_minus, m1_plus) with everything else fixed; one
/// generated input realization and one echo estimate per cell.
struct SweepConfig {
    std::string preset = "esn2d";
    int m0_minus_lo = 1, m0_minus_hi = 40;
    int m1_plus_lo = 1, m1_plus_hi = 40;
    int m0_plus = 40;
    int m1_minus = 1;
    double p0 = 0.9;
    double p1 = 0.95;
    int sequence_length = 2000;  // T
    int ensemble_size = 50;      // initial conditions per cell
    double cluster_tol = 1e-3;
    std::uint64_t base_seed = 0x5eedba5eULL;
    int threads = 0;  // 0: hardware concurrency
    int realizations = 1;

    void validate() const {
        if (m0_minus_lo < 1 || m0_minus_lo > m0_minus_hi)
            throw InvalidSpec("m0_minus range is empty or invalid");
        if (m1_plus_lo < 1 || m1_plus_lo > m1_plus_hi)
            throw InvalidSpec("m1_plus range is empty or invalid");
        if (m1_minus < 1 || m1_plus_lo < m1_minus)
            throw InvalidSpec("m1_plus range must respect m1_minus");
        if (m0_plus < m0_minus_hi)
            throw InvalidSpec("m0_plus must dominate the m0_minus range");
        if (sequence_length < 1) throw InvalidSpec("sequence length must be >= 1");
        if (ensemble_size < 1) throw InvalidSpec("ensemble size must be >= 1");
        if (realizations < 1) throw InvalidSpec("realizations must be >= 1");
        if (cluster_tol <= 0.0) throw InvalidSpec("cluster tolerance must be positive");
        // Per-cell specs must validate for the whole grid.
        RepeatSpec::binary(m0_minus_hi, m0_plus, m1_minus, m1_plus_lo, p0, p1).validate();
    }

    int columns() const { return m0_minus_hi - m0_minus_lo + 1; }
    int rows() const { return m1_plus_hi - m1_plus_lo + 1; }
};

struct SweepCell {
    int m0_minus = 0;
    int m1_plus = 0;
    int index = 0;  // 0 marks a failed cell
    std::vector<int> cluster_sizes;
    std::uint64_t seed = 0;
    int flagged_clusters = 0;
    std::string error;  // empty on success
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepCell> cells;  // ordered by (m0_minus asc, m1_plus asc)
    std::vector<int> warned_columns;  // periodic mode only

    const SweepCell& cell(int m0_minus, int m1_plus) const {
        const int c = m0_minus - config.m0_minus_lo;
        const int r = m1_plus - config.m1_plus_lo;
        return cells[static_cast<std::size_t>(c) * config.rows() + r];
    }
    bool any_error() const {
        for (const auto& c : cells)
            if (!c.error.empty()) return true;
        return false;
    }
};

/// Seed of one sweep cell; depends only on the base seed and the cell
/// coordinates, so cells are independent of grid shape and schedule.
inline std::uint64_t sweep_cell_seed(std::uint64_t base_seed, int m0_minus, int m1_plus) {
    return seed_combine(base_seed, static_cast<std::uint64_t>(m0_minus),
                        static_cast<std::uint64_t>(m1_plus));
}

/// Column check for the deterministic (p0=0, p1=1) regime: once the index
/// drops to 1 along increasing m1_plus it should stay there. Returns the
/// m0_minus values violating that.
inline std::vector<int> monotonicity_warnings(const SweepResult& result) {
    std::vector<int> warned;
    for (int m0 = result.config.m0_minus_lo; m0 <= result.config.m0_minus_hi; ++m0) {
        bool seen_one = false, warned_col = false;
        for (int m1 = result.config.m1_plus_lo; m1 <= result.config.m1_plus_hi; ++m1) {
            const int index = result.cell(m0, m1).index;
            if (index == 1) seen_one = true;
            else if (seen_one) { warned_col = true; break; }
        }
        if (warned_col) warned.push_back(m0);
    }
    return warned;
}

inline SweepResult run_sweep(const MapFamily& family, const SweepConfig& config) {
    config.validate();
    SweepResult result;
    result.config = config;
    result.cells.resize(static_cast<std::size_t>(config.columns()) * config.rows());

    const auto compute_cell = [&](std::size_t flat) {
        const int m0 = config.m0_minus_lo + static_cast<int>(flat) / config.rows();
        const int m1 = config.m1_plus_lo + static_cast<int>(flat) % config.rows();
        SweepCell cell;
        cell.m0_minus = m0;
        cell.m1_plus = m1;
        cell.seed = sweep_cell_seed(config.base_seed, m0, m1);
        try {
            const auto spec =
                RepeatSpec::binary(m0, config.m0_plus, config.m1_minus, m1, config.p0, config.p1);
            double index_sum = 0.0;
            for (int r = 0; r < config.realizations; ++r) {
                const auto v = generate_sequence(spec, config.sequence_length,
                                                 seed_combine(cell.seed, 1, r));
                const auto est =
                    estimate_echo_index(family, v, config.ensemble_size, config.sequence_length,
                                        config.cluster_tol, seed_combine(cell.seed, 2, r));
                index_sum += est.index;
                if (r == 0) {
                    cell.cluster_sizes = est.cluster_sizes;
                    cell.flagged_clusters = est.flagged_clusters;
                }
            }
            cell.index = static_cast<int>(std::lround(index_sum / config.realizations));
        } catch (const Error& e) {
            cell.error = e.what();
            cell.index = 0;
        }
        result.cells[flat] = std::move(cell);
    };

    int workers = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers == 1) {
        for (std::size_t flat = 0; flat < result.cells.size(); ++flat) compute_cell(flat);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t flat = next.fetch_add(1); flat < result.cells.size();
                     flat = next.fetch_add(1))
                    compute_cell(flat);
            });
        }
        for (auto& t : pool) t.join();
    }

    if (config.p0 == 0.0 && config.p1 == 1.0)
        result.warned_columns = monotonicity_warnings(result);
    return result;
}

/// Convenience overload building the preset family named in the config.
inline SweepResult run_sweep(const SweepConfig& config) {
    if (config.preset == "esn2d") return run_sweep(make_esn2d(), config);
    if (config.preset == "diabolic") return run_sweep(make_diabolic(), config);
    throw InvalidSpec("unknown preset '" + config.preset + "'; pass the family explicitly");
}

}  // namespace echolab
