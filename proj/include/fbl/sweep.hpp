#pragma once

// Figure-reproduction sweeps: grids, series composition per figure, CSV
// emission and the closed-form / quadrature / Monte Carlo cross check.

#include <cstdint>
#include <string>
#include <vector>

#include "fbl/config.hpp"
#include "fbl/csv.hpp"
#include "fbl/optimize.hpp"

namespace fbl::sweep {

enum class FigureId {
    EeeVsSnr = 2,      // EEE against SNR for several delay exponents
    EeeVsEpsilon = 3,  // EEE against error probability, both buffer models
    EeeVsDelta = 4,    // solver-backed: max EEE against the delay bound
    PowerVsDelta = 5,  // solver-backed: optimum SNR against the delay bound
    EcVsDelta = 6,     // solver-backed: EC at the optimum against the delay bound
};

enum class GridSpacing { Linear, Log10, Decibel };

struct GridSpec {
    double start = 0.0;
    double stop = 1.0;
    int count = 2;
    GridSpacing spacing = GridSpacing::Linear;

    void validate() const;
    std::vector<double> points() const;
};

// One curve of a figure.
struct SeriesSpec {
    std::string label;
    effcap::BufferMode buffer = effcap::BufferMode::FullBuffer;
    channel::RateModel model = channel::RateModel::FiniteBlocklength;
    effcap::EcMethod method = effcap::EcMethod::ClosedForm;
    double lambda_out = 1e-2;   // Lambda driving the delay exponent
    double arrival_rate = 1.0;  // lambda
    double theta = 0.0;         // explicit delay exponent (figure 2 series)
};

struct SweepSpec {
    FigureId figure = FigureId::EeeVsSnr;
    GridSpec grid;
    config::ParamBundle base;
    std::vector<SeriesSpec> series;
    int jobs = 1;

    void validate() const;

    // Default grid and series for a figure; oracle_check adds quadrature
    // twins next to every closed-form series.
    static SweepSpec for_figure(FigureId figure, const config::ParamBundle& base,
                                bool oracle_check = false);
};

// One row per grid point; solver-backed figures add a feasibility column per
// series.  Per-point evaluation errors become empty cells plus a footer note.
csv::CsvTable run_sweep(const SweepSpec& spec);

// Pointwise figures only: closed-form, quadrature-oracle and Monte Carlo EEE
// columns with relative errors, one block per series.
csv::CsvTable cross_check(const SweepSpec& spec, std::size_t samples,
                          std::uint64_t seed);

}  // namespace fbl::sweep
