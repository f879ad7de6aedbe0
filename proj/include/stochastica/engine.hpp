#pragma once
// Simulation orchestration: resolved configurations, the three-level ensemble
// hierarchy with reproducible per-member noise streams, paired fine/coarse
// integration sharing coarsened noise, Richardson extrapolation and
// sub-ensemble statistics per output graph, sequence chaining through
// transfer, parameter scans, and the step-halving convergence checker.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stochastica/advanced.hpp"
#include "stochastica/boundaries.hpp"
#include "stochastica/core.hpp"
#include "stochastica/errors.hpp"
#include "stochastica/lattice.hpp"
#include "stochastica/observables.hpp"
#include "stochastica/randoms.hpp"
#include "stochastica/spectral.hpp"
#include "stochastica/stepper.hpp"

namespace stochastica {

// Initial state from the initial-random set; default is the zero field.
using InitialFn = std::function<Fields(const NoiseSet& randoms, const Grid&)>;

// Map the final state of one sequence element to the initial state of the
// next; default passes the field through unchanged.
using TransferFn = std::function<Fields(
    const Fields& prev_final, const Grid& prev_grid, const NoiseSet& randoms,
    const Grid& grid)>;

struct SimConfig {
  std::string name = "simulation";

  GridSpec grid;       // time + space lattice; steps = substeps per output
  NoiseSpec noise;     // propagation noises and initial randoms
  std::vector<int> fields = {1};  // components per integrated field cell

  // Integration method; unset selects midpoint with noise, RK4 without.
  std::optional<Method> method;
  // Constraint-manifold stepping replaces `method` when a manifold is set.
  std::optional<Manifold> manifold;
  ProjectedMethod projected = ProjectedMethod::mpnproj;

  int iterations = 4;
  double adapt_threshold = 1.0;
  // Extrapolation order; -1 resolves to 1 with noise present, else to the
  // method's deterministic order.
  int order = 1;
  int checks = 1;  // 1 = paired half-step run with shared coarsened noise
  std::uint64_t seed = 0;
  std::array<int, 3> ensembles{{1, 1, 1}};  // [vector, serial, parallel]
  double thresholdw = 0;  // weighted-trajectory breeding cut (0 = off)

  InitialFn initial;
  DerivFn deriv;
  LinearOp linear;  // interaction-picture linear operator (null = none)
  AuxSpec aux;      // auxiliary cell definition appended to observables
  TransferFn transfer;

  std::vector<ObserveSpec> observe;  // empty -> one default graph
  BoundarySpec boundaries;
  BoundaryValues boundvals;
  // Time-dependent boundary values, re-evaluated after every step; when set
  // they replace boundvals.
  std::function<BoundaryValues(const Grid&, double)> boundfun;

  // Goodness-of-fit controls: per-graph entries default to the globals.
  double cutoff = 1e-12;
  double mincount = 10;
  std::vector<double> cutoffs;  // per graph
  std::vector<double> scales;   // per graph; > 0 selects count-mode chi2

  bool relerr = true;   // normalize reported errors
  bool rmserr = true;   // RMS reduction (false = maximum)
  int rawdata = 0;      // 1 = keep per-member trajectories
  std::string file;     // result-file path written by the CLI layer
  int verbose = 0;      // < 0 silences the printed error report

  // Model constants echoed into result-file headers.
  std::map<std::string, std::string> constants;
};

// Fill every defaulted field (grid extents, noise counts, method, order,
// graph vectors) and validate the combination.  Idempotent.
SimConfig resolve_defaults(const SimConfig& cfg);

// One reduced output graph with its error planes.  Planes are stored
// flattened as [axis point][line][space][kept ensemble] real values; an empty
// plane is absent.  Plane indices follow the check-index convention:
// 0 mean, 1 step error, 2 sampling sigma, 3 comparison, 4 comparison
// systematic error, 5 comparison statistical error.
struct GraphData {
  std::string label;
  bool spectral = false;     // axis holds omega instead of time
  std::vector<double> axis;
  std::vector<std::vector<double>> bin_centers;  // binned graphs only
  int lines = 0;             // leading value dimension (lines or joint bins)
  std::vector<int> space;    // reduced space extents
  int ens_kept = 1;          // > 1 for scatter graphs
  int values_per_point = 0;  // lines * prod(space) * ens_kept
  std::array<std::vector<double>, 6> planes;

  bool has(int c) const { return !planes[static_cast<std::size_t>(c)].empty(); }
  double at(int c, int axis_index, int value_index) const {
    return planes[static_cast<std::size_t>(c)]
                 [static_cast<std::size_t>(axis_index) * values_per_point +
                  static_cast<std::size_t>(value_index)];
  }
};

struct SequenceData {
  std::vector<GraphData> graphs;
};

struct ResultData {
  std::vector<SequenceData> seq;
  std::vector<SimConfig> resolved;  // configs with defaults applied
  // raw[s][check][member][output point] -> field cells (+ aux cell);
  // filled only when rawdata is set.
  std::vector<std::vector<std::vector<std::vector<Fields>>>> raw;
};

// Error planes of one sequence element, ready for summarize().
std::vector<ErrorPlanes> result_planes(const ResultData& results, int s);

// Run a sequence of simulations: every serial x parallel ensemble member
// advances the whole sequence on its own noise stream, fine and coarse
// passes share coarsened noise when checks is set, and graph planes are
// reduced deterministically in member order.  Prints the error report at
// verbose >= 0 on the first config.
std::pair<ErrorVector, ResultData> simulate(const std::vector<SimConfig>& sequence);
std::pair<ErrorVector, ResultData> simulate(const SimConfig& cfg);

// Rebuild a configuration from named constants; used by scans and the CLI
// so that equation callbacks capture the scanned values.
using ConfigFactory =
    std::function<SimConfig(const std::map<std::string, double>& constants)>;

struct ScanExtract {
  int graph = 0;
  int line = 0;        // value index within a point
  int time_index = -1; // -1 = last axis point
};

struct ScanRow {
  double value = 0;      // scanned parameter value
  double mean = 0;
  double step_error = 0;
  double sampling = 0;
  double comparison = 0;
  bool has_step = false;
  bool has_sampling = false;
  bool has_comparison = false;
};

// Run the factory once per scanned value with a fresh seed each time and
// extract one (mean, step, sampling) triple per run.
std::vector<ScanRow> scan_parameter(const ConfigFactory& make,
                                    const std::string& key,
                                    const std::vector<double>& values,
                                    const ScanExtract& extract);

// Convergence table for a configuration: rerun with steps doubled per level.
std::vector<XcheckLevel> xcheck(int levels, const SimConfig& cfg);

}  // namespace stochastica
