#include "stochastica/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <sstream>
#include <thread>
#include <utility>

#include "stochastica/findiff.hpp"

namespace stochastica {

namespace {

long total(const std::vector<int>& v) {
  long t = 0;
  for (int x : v) t += x;
  return t;
}

bool has_noise(const NoiseSpec& n) {
  return total(n.noises) + total(n.knoises) + total(n.unoises) > 0;
}

bool needs_kspace(const NoiseSpec& n) {
  return total(n.knoises) + total(n.krandoms) > 0;
}

bool any_temporal(const std::vector<ObserveSpec>& specs) {
  for (const auto& s : specs)
    if (!s.transforms.empty() && s.transforms[0] != 0) return true;
  return false;
}

Fields zero_fields(const SimConfig& cfg, const Grid& g) {
  Fields a;
  a.reserve(cfg.fields.size());
  for (int nf : cfg.fields) a.emplace_back(nf, g.space_points(), cfg.ensembles[0]);
  return a;
}

void check_transfer_shape(const Fields& prev, const SimConfig& cfg,
                          const Grid& g, int s) {
  require(prev.size() == cfg.fields.size(), ErrKind::config,
          "sequence " + std::to_string(s + 1) +
              ": default transfer needs matching field cell counts");
  const std::vector<int> space = g.space_points();
  for (std::size_t c = 0; c < prev.size(); ++c) {
    require(prev[c].nf == cfg.fields[c] && prev[c].space == space &&
                prev[c].nens == cfg.ensembles[0],
            ErrKind::config,
            "sequence " + std::to_string(s + 1) +
                ": default transfer needs matching field shapes");
  }
}

// Append real parts of one reduced point to a flat plane.
void append_point(std::vector<double>& flat, const Field& f) {
  for (const cplx& z : f.v) flat.push_back(z.real());
}

std::vector<double> flatten_graph(const GraphResult& gr) {
  std::vector<double> flat;
  if (!gr.points.empty())
    flat.reserve(gr.points.size() * gr.points[0].v.size());
  for (const Field& f : gr.points) append_point(flat, f);
  return flat;
}

// --------------------------------------------------------------------------
// One integration pass (fine or coarse) of one ensemble member.

struct PassOutput {
  std::vector<GraphResult> graphs;
  std::vector<Fields> stored;  // per output point, with aux; rawdata only
  Fields final_state;
};

struct PassSetup {
  const SimConfig* cfg = nullptr;
  const Grid* grid = nullptr;
  int sequence = 0;
  bool fine = true;    // coarse passes rebuild the fine noise and coarsen it
  bool halved = false; // fine pass runs at half step when checks are on
  bool want_chain = false;     // sub-step samples needed (spectra or aux)
  bool want_midseries = false; // evaluate on the midpoint series
  SpectralWorkspace* ws = nullptr;
  const KSpaceTransform* kspace = nullptr;
};

PassOutput integrate_pass(const PassSetup& ps, const RngState& rng,
                          const Fields& a0) {
  const SimConfig& cfg = *ps.cfg;
  const Grid& g = *ps.grid;
  const int nout = g.points[0];
  const int steps0 = g.steps[0];
  const int sub = steps0 * (ps.halved ? 2 : 1);
  const double dtr = g.dt / sub;
  const double t0 = g.origins[0];
  const std::uint64_t ctxp =
      rng_context(ps.sequence, kCtxPropagation);

  // Noise for one computational step of this pass.  A coarse pass redraws
  // the two matching fine half-step noises by counter and coarsens them, so
  // fine and coarse always share one underlying noise path.
  auto draw = [&](long index) {
    if (ps.fine)
      return propagation_noise(g, cfg.noise, dtr, cfg.ensembles[0], rng, ctxp,
                               static_cast<std::uint64_t>(index), ps.kspace);
    NoiseSet a = propagation_noise(g, cfg.noise, dtr / 2, cfg.ensembles[0],
                                   rng, ctxp,
                                   static_cast<std::uint64_t>(2 * index),
                                   ps.kspace);
    NoiseSet b = propagation_noise(g, cfg.noise, dtr / 2, cfg.ensembles[0],
                                   rng, ctxp,
                                   static_cast<std::uint64_t>(2 * index + 1),
                                   ps.kspace);
    return coarsen_noise(a, b);
  };

  // Interaction-picture propagators for this pass's step size.
  Propagator full, half;
  StepContext ctx;
  ctx.iterations = cfg.iterations;
  ctx.adapt_threshold = cfg.adapt_threshold;
  ctx.dtr = dtr;
  ctx.deriv = cfg.deriv;
  ctx.ws = ps.ws;
  if (cfg.linear && !cfg.manifold) {
    const MethodTraits traits = method_traits(*cfg.method);
    if (traits.ipsteps == 1) {
      full = build_propagator(g, cfg.fields, cfg.boundaries, cfg.linear, dtr);
      ctx.full = &full;
    } else {
      half = build_propagator(g, cfg.fields, cfg.boundaries, cfg.linear,
                              dtr / 2);
      ctx.half = &half;
    }
  }

  const bool have_boundvals = !cfg.boundvals.empty() || bool(cfg.boundfun);
  BoundaryValues bvals = cfg.boundvals;

  Fields a = a0;
  WeightState wstate;
  wstate.thresholdw = cfg.thresholdw;

  std::vector<Fields> chain;
  std::vector<Fields> stored;
  stored.reserve(static_cast<std::size_t>(nout));
  if (ps.want_chain)
    chain.reserve(static_cast<std::size_t>(nout - 1) * sub + 1);

  if (ps.want_chain) chain.push_back(a);
  stored.push_back(a);

  for (int j = 0; j < nout - 1; ++j) {
    for (int q = 0; q < sub; ++q) {
      const long gidx = static_cast<long>(j) * sub + q;
      NoiseSet w = draw(gidx);
      ctx.t = t0 + gidx * dtr;
      if (cfg.manifold)
        a = step_projected(cfg.projected, a, w, ctx, *cfg.manifold);
      else
        a = step(*cfg.method, a, w, ctx);
      if (have_boundvals) {
        if (cfg.boundfun) bvals = cfg.boundfun(g, t0 + (gidx + 1) * dtr);
        impose_boundaries(a, g, cfg.boundaries, bvals);
      }
      if (cfg.thresholdw > 0) breed(wstate, a[0]);
      if (ps.want_chain) chain.push_back(a);
    }
    stored.push_back(a);
  }

  // Midpoint-cadence field averages and auxiliary values.  The auxiliary
  // noise argument is the coarse-cadence noise, which both passes share.
  const bool have_aux = bool(cfg.aux.define);
  const int nmid = (nout - 1) * steps0;
  std::vector<Fields> mid;
  std::vector<Field> aux_mid;
  if (ps.want_chain) {
    mid.assign(static_cast<std::size_t>(nmid), Fields{});
    std::vector<Field> cell_chain(chain.size());
    for (std::size_t c = 0; c < cfg.fields.size(); ++c) {
      for (std::size_t i = 0; i < chain.size(); ++i) cell_chain[i] = chain[i][c];
      std::vector<Field> m = spectral_field_average(cell_chain, ps.halved);
      for (int p = 0; p < nmid; ++p)
        mid[static_cast<std::size_t>(p)].push_back(std::move(m[static_cast<std::size_t>(p)]));
    }
    if (have_aux) {
      const double h = g.dt / steps0;
      aux_mid.reserve(static_cast<std::size_t>(nmid));
      for (int p = 0; p < nmid; ++p) {
        NoiseSet w = ps.halved || !ps.fine
                         ? coarsen_noise(
                               propagation_noise(g, cfg.noise, g.dt / steps0 / 2,
                                                 cfg.ensembles[0], rng, ctxp,
                                                 static_cast<std::uint64_t>(2 * p),
                                                 ps.kspace),
                               propagation_noise(g, cfg.noise, g.dt / steps0 / 2,
                                                 cfg.ensembles[0], rng, ctxp,
                                                 static_cast<std::uint64_t>(2 * p + 1),
                                                 ps.kspace))
                         : propagation_noise(g, cfg.noise, g.dt / steps0,
                                             cfg.ensembles[0], rng, ctxp,
                                             static_cast<std::uint64_t>(p),
                                             ps.kspace);
        aux_mid.push_back(
            cfg.aux.define(mid[static_cast<std::size_t>(p)], w, t0 + (p + 0.5) * h));
      }
    }
  }

  // The stored-cadence auxiliary takes the last sub-interval before each
  // output point (the first interval at point 0), matching the midpoint
  // series mapping.
  auto stored_aux_index = [&](int j) { return j == 0 ? 0 : j * steps0 - 1; };

  TrajectorySeries ser;
  ser.stored_points = nout;
  ser.steps = steps0;
  if (ps.want_midseries) {
    const double h = g.dt / steps0;
    ser.midpoint = true;
    ser.t0 = t0;
    ser.h = h;
    for (int p = 0; p < nmid; ++p) {
      ser.t.push_back(t0 + (p + 0.5) * h);
      Fields cells = mid[static_cast<std::size_t>(p)];
      if (have_aux) cells.push_back(aux_mid[static_cast<std::size_t>(p)]);
      ser.cells.push_back(std::move(cells));
    }
  } else {
    for (int j = 0; j < nout; ++j) {
      ser.t.push_back(t0 + j * g.dt);
      Fields cells = stored[static_cast<std::size_t>(j)];
      if (have_aux)
        cells.push_back(aux_mid[static_cast<std::size_t>(stored_aux_index(j))]);
      ser.cells.push_back(std::move(cells));
    }
  }

  PassOutput out;
  out.graphs = evaluate_observables(ser, cfg.observe, g, *ps.ws);
  out.final_state = std::move(a);
  if (cfg.rawdata) {
    out.stored.reserve(stored.size());
    for (int j = 0; j < nout; ++j) {
      Fields cells = std::move(stored[static_cast<std::size_t>(j)]);
      if (have_aux)
        cells.push_back(aux_mid[static_cast<std::size_t>(stored_aux_index(j))]);
      out.stored.push_back(std::move(cells));
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Per-member storage for the deterministic reduction.

struct MemberSlot {
  // [sequence][graph] -> flattened plane
  std::vector<std::vector<std::vector<double>>> fine, coarse;
  // [sequence][output point] -> cells; rawdata only
  std::vector<std::vector<Fields>> raw_fine, raw_coarse;
};

struct GraphShape {
  std::string label;
  bool spectral = false;
  std::vector<double> axis;
  std::vector<std::vector<double>> bin_centers;
  int lines = 0;
  std::vector<int> space;
  int ens_kept = 1;
};

}  // namespace

SimConfig resolve_defaults(const SimConfig& in) {
  SimConfig c = in;
  const int d = c.grid.dimensions;
  require(d >= 1, ErrKind::config, "dimensions must be at least 1");

  auto extend_int = [](std::vector<int>& v, int n, int def) {
    while (static_cast<int>(v.size()) < n) v.push_back(def);
  };
  extend_int(c.grid.points, d, 51);
  while (static_cast<int>(c.grid.ranges.size()) < d) c.grid.ranges.push_back(10.0);
  for (int i = 0; i < d; ++i)
    require(c.grid.points[i] >= 2, ErrKind::config,
            "every grid dimension needs at least two points");
  if (!c.grid.origins.empty()) {
    while (static_cast<int>(c.grid.origins.size()) < d) {
      const int i = static_cast<int>(c.grid.origins.size());
      c.grid.origins.push_back(i == 0 ? 0.0 : -c.grid.ranges[i] / 2);
    }
  }
  extend_int(c.grid.steps, d, 1);
  require(c.grid.steps[0] >= 1, ErrKind::config, "steps must be positive");

  require(!c.fields.empty(), ErrKind::config, "at least one field cell");
  for (int nf : c.fields)
    require(nf >= 1, ErrKind::config, "field cells need at least one component");

  // One real noise per field component unless any noise kind was set; an
  // explicit zero count (noises = {0}) keeps a problem deterministic.
  if (c.noise.noises.empty() && c.noise.knoises.empty() &&
      c.noise.unoises.empty())
    c.noise.noises = c.fields;

  // Initial-random kinds default to their propagation counterparts.
  if (c.noise.inrandoms.empty()) c.noise.inrandoms = c.noise.noises;
  if (c.noise.krandoms.empty()) c.noise.krandoms = c.noise.knoises;
  if (c.noise.urandoms.empty()) c.noise.urandoms = c.noise.unoises;

  if (!c.method)
    c.method = has_noise(c.noise) ? Method::mp : Method::rk4;
  if (c.manifold) {
    require(!c.linear, ErrKind::config,
            "projected stepping does not take a linear operator");
  }
  if (c.order < 0)
    c.order = has_noise(c.noise) ? 1 : method_traits(*c.method).det_order;
  require(c.checks == 0 || c.checks == 1, ErrKind::config,
          "checks must be 0 or 1");
  require(c.iterations >= 1, ErrKind::config, "iterations must be positive");
  for (int e : c.ensembles)
    require(e >= 1, ErrKind::config, "ensemble sizes must be positive");

  if (c.observe.empty()) c.observe.emplace_back();
  const std::size_t n = c.observe.size();
  while (c.cutoffs.size() < n) c.cutoffs.push_back(c.cutoff);
  while (c.scales.size() < n) c.scales.push_back(0.0);
  return c;
}

std::vector<ErrorPlanes> result_planes(const ResultData& results, int s) {
  require(s >= 0 && s < static_cast<int>(results.seq.size()), ErrKind::config,
          "sequence index out of range");
  const SimConfig& cfg = results.resolved[static_cast<std::size_t>(s)];
  std::vector<ErrorPlanes> planes;
  const auto& graphs = results.seq[static_cast<std::size_t>(s)].graphs;
  planes.reserve(graphs.size());
  for (std::size_t n = 0; n < graphs.size(); ++n) {
    const GraphData& gd = graphs[n];
    ErrorPlanes p;
    p.label = gd.label;
    p.mean = gd.planes[0];
    p.step = gd.planes[1];
    p.sampling = gd.planes[2];
    p.comparison = gd.planes[3];
    p.comp_sys = gd.planes[4];
    p.comp_stat = gd.planes[5];
    p.cutoff = cfg.cutoffs[n];
    p.mincount = cfg.mincount;
    p.scale = cfg.scales[n];
    planes.push_back(std::move(p));
  }
  return planes;
}

std::pair<ErrorVector, ResultData> simulate(const std::vector<SimConfig>& sequence) {
  const auto t_start = std::chrono::steady_clock::now();
  require(!sequence.empty(), ErrKind::config, "empty simulation sequence");

  // Resolve every element; an unset time origin continues the previous axis.
  std::vector<SimConfig> resolved;
  std::vector<Grid> grids;
  resolved.reserve(sequence.size());
  for (std::size_t s = 0; s < sequence.size(); ++s) {
    SimConfig c = sequence[s];
    if (s > 0 && c.grid.origins.empty())
      c.grid.origins.push_back(grids[s - 1].origins[0] + grids[s - 1].ranges[0]);
    c = resolve_defaults(c);
    resolved.push_back(c);
    grids.push_back(build_grid(c.grid));
  }
  for (std::size_t s = 1; s < resolved.size(); ++s) {
    require(resolved[s].ensembles[1] == resolved[0].ensembles[1] &&
                resolved[s].ensembles[2] == resolved[0].ensembles[2],
            ErrKind::config,
            "serial and parallel ensembles cannot change during a sequence");
    require(resolved[s].seed == resolved[0].seed, ErrKind::config,
            "the seed cannot change during a sequence");
  }

  const int S = static_cast<int>(resolved.size());
  const int serial = resolved[0].ensembles[1];
  const int parallel = resolved[0].ensembles[2];
  const int M = serial * parallel;
  const int checks = [&] {
    int any = 0;
    for (const auto& c : resolved) any |= c.checks;
    return any;
  }();
  for (const auto& c : resolved)
    require(c.checks == checks, ErrKind::config,
            "checks cannot change during a sequence");

  std::vector<MemberSlot> slots(static_cast<std::size_t>(M));
  std::vector<std::vector<GraphShape>> shapes(static_cast<std::size_t>(S));
  const bool want_raw = [&] {
    for (const auto& c : resolved)
      if (c.rawdata) return true;
    return false;
  }();

  auto run_member = [&](int m, SpectralWorkspace& ws) {
    MemberSlot& slot = slots[static_cast<std::size_t>(m)];
    slot.fine.resize(static_cast<std::size_t>(S));
    slot.coarse.resize(static_cast<std::size_t>(S));
    if (want_raw) {
      slot.raw_fine.resize(static_cast<std::size_t>(S));
      slot.raw_coarse.resize(static_cast<std::size_t>(S));
    }
    RngState rng{resolved[0].seed, static_cast<std::uint64_t>(m)};
    Fields prev_fine, prev_coarse;
    for (int s = 0; s < S; ++s) {
      const SimConfig& cfg = resolved[static_cast<std::size_t>(s)];
      const Grid& g = grids[static_cast<std::size_t>(s)];
      try {
        PeriodicKSpace kspace(g, ws);
        const KSpaceTransform* ks = needs_kspace(cfg.noise) ? &kspace : nullptr;
        NoiseSet init = initial_randoms(g, cfg.noise, cfg.ensembles[0], rng,
                                        rng_context(s, kCtxInitial), ks);
        auto start_state = [&](const Fields& prev) {
          if (s == 0) {
            if (cfg.initial) return cfg.initial(init, g);
            return zero_fields(cfg, g);
          }
          if (cfg.transfer)
            return cfg.transfer(prev, grids[static_cast<std::size_t>(s - 1)], init, g);
          check_transfer_shape(prev, cfg, g, s);
          return prev;
        };

        PassSetup ps;
        ps.cfg = &cfg;
        ps.grid = &g;
        ps.sequence = s;
        ps.ws = &ws;
        ps.kspace = ks;
        const bool mids = any_temporal(cfg.observe);
        ps.want_midseries = mids;
        ps.want_chain = mids || bool(cfg.aux.define);

        ps.fine = true;
        ps.halved = checks == 1;
        PassOutput fine = integrate_pass(ps, rng, start_state(prev_fine));
        for (auto& gr : fine.graphs)
          slot.fine[static_cast<std::size_t>(s)].push_back(flatten_graph(gr));
        if (want_raw)
          slot.raw_fine[static_cast<std::size_t>(s)] = std::move(fine.stored);

        if (checks == 1) {
          ps.fine = false;
          ps.halved = false;
          PassOutput coarse = integrate_pass(ps, rng, start_state(prev_coarse));
          for (auto& gr : coarse.graphs)
            slot.coarse[static_cast<std::size_t>(s)].push_back(flatten_graph(gr));
          if (want_raw)
            slot.raw_coarse[static_cast<std::size_t>(s)] = std::move(coarse.stored);
          prev_coarse = std::move(coarse.final_state);
        }
        prev_fine = std::move(fine.final_state);

        if (m == 0) {
          auto& sh = shapes[static_cast<std::size_t>(s)];
          for (std::size_t n = 0; n < fine.graphs.size(); ++n) {
            const GraphResult& gr = fine.graphs[n];
            GraphShape shape;
            shape.label = cfg.observe[n].label.empty()
                              ? "graph " + std::to_string(n + 1)
                              : cfg.observe[n].label;
            shape.spectral = gr.spectral;
            shape.axis = gr.axis;
            shape.bin_centers = gr.bin_centers;
            if (!gr.points.empty()) {
              shape.lines = gr.points[0].nf;
              shape.space = gr.points[0].space;
              shape.ens_kept = gr.points[0].nens;
            }
            sh.push_back(std::move(shape));
          }
        }
      } catch (const SimError& e) {
        throw SimError(e.kind(), "sequence " + std::to_string(s + 1) + " (" +
                                     cfg.name + ", " +
                                     method_name(*cfg.method) +
                                     "): " + e.what());
      }
    }
  };

  if (parallel == 1) {
    SpectralWorkspace ws;
    for (int m = 0; m < M; ++m) run_member(m, ws);
  } else {
    std::vector<std::thread> lanes;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(parallel));
    lanes.reserve(static_cast<std::size_t>(parallel));
    for (int p = 0; p < parallel; ++p) {
      lanes.emplace_back([&, p] {
        try {
          SpectralWorkspace ws;
          for (int s2 = 0; s2 < serial; ++s2) run_member(p * serial + s2, ws);
        } catch (...) {
          errors[static_cast<std::size_t>(p)] = std::current_exception();
        }
      });
    }
    for (auto& t : lanes) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Deterministic member-order reduction into graph planes.
  ResultData results;
  results.resolved = resolved;
  results.seq.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const SimConfig& cfg = resolved[static_cast<std::size_t>(s)];
    auto& graphs = results.seq[static_cast<std::size_t>(s)].graphs;
    const std::size_t N = shapes[static_cast<std::size_t>(s)].size();
    for (std::size_t n = 0; n < N; ++n) {
      const GraphShape& shape = shapes[static_cast<std::size_t>(s)][n];
      GraphData gd;
      gd.label = shape.label;
      gd.spectral = shape.spectral;
      gd.axis = shape.axis;
      gd.bin_centers = shape.bin_centers;
      gd.lines = shape.lines;
      gd.space = shape.space;
      gd.ens_kept = shape.ens_kept;
      int nspace = 1;
      for (int x : shape.space) nspace *= x;
      gd.values_per_point = shape.lines * nspace * shape.ens_kept;

      const ObserveSpec& spec = cfg.observe[n];
      if (spec.scatters > 0) {
        // Scatter graphs keep member 0's trajectories without averaging.
        gd.planes[0] = slots[0].fine[static_cast<std::size_t>(s)][n];
        graphs.push_back(std::move(gd));
        continue;
      }

      const std::size_t V = slots[0].fine[static_cast<std::size_t>(s)][n].size();
      std::vector<double> grand_fine(V, 0.0), grand_coarse;
      for (int m = 0; m < M; ++m) {
        const auto& f = slots[static_cast<std::size_t>(m)].fine[static_cast<std::size_t>(s)][n];
        for (std::size_t i = 0; i < V; ++i) grand_fine[i] += f[i];
      }
      for (double& v : grand_fine) v /= M;

      if (checks == 1) {
        grand_coarse.assign(V, 0.0);
        for (int m = 0; m < M; ++m) {
          const auto& c = slots[static_cast<std::size_t>(m)].coarse[static_cast<std::size_t>(s)][n];
          for (std::size_t i = 0; i < V; ++i) grand_coarse[i] += c[i];
        }
        for (double& v : grand_coarse) v /= M;
        Extrapolation ex = extrapolate(grand_fine, grand_coarse, cfg.order);
        gd.planes[0] = std::move(ex.value);
        gd.planes[1] = std::move(ex.step_error);
      } else {
        gd.planes[0] = grand_fine;
      }

      if (M >= 2) {
        std::vector<std::vector<double>> subs;
        subs.reserve(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
          const auto& slot = slots[static_cast<std::size_t>(m)];
          if (checks == 1)
            subs.push_back(
                extrapolate(slot.fine[static_cast<std::size_t>(s)][n],
                            slot.coarse[static_cast<std::size_t>(s)][n], cfg.order)
                    .value);
          else
            subs.push_back(slot.fine[static_cast<std::size_t>(s)][n]);
        }
        gd.planes[2] = sampling_stats(subs).sigma;
      }

      if (spec.compare) {
        std::vector<double>& comp = gd.planes[3];
        comp.reserve(V);
        for (double av : gd.axis) {
          std::vector<cplx> vals = spec.compare(av);
          require(static_cast<int>(vals.size()) == shape.lines, ErrKind::config,
                  "comparison for " + shape.label + " must return " +
                      std::to_string(shape.lines) + " line value(s)");
          for (int f = 0; f < shape.lines; ++f)
            for (int x = 0; x < nspace * shape.ens_kept; ++x)
              comp.push_back(vals[static_cast<std::size_t>(f)].real());
        }
      }
      graphs.push_back(std::move(gd));
    }
  }

  if (want_raw) {
    results.raw.resize(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
      if (!resolved[static_cast<std::size_t>(s)].rawdata) continue;
      auto& per_seq = results.raw[static_cast<std::size_t>(s)];
      per_seq.resize(checks == 1 ? 2 : 1);
      for (int m = 0; m < M; ++m) {
        per_seq[0].push_back(std::move(slots[static_cast<std::size_t>(m)]
                                           .raw_fine[static_cast<std::size_t>(s)]));
        if (checks == 1)
          per_seq[1].push_back(std::move(slots[static_cast<std::size_t>(m)]
                                             .raw_coarse[static_cast<std::size_t>(s)]));
      }
    }
  }

  std::vector<ErrorPlanes> all_planes;
  for (int s = 0; s < S; ++s) {
    auto planes = result_planes(results, s);
    all_planes.insert(all_planes.end(), std::make_move_iterator(planes.begin()),
                      std::make_move_iterator(planes.end()));
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  std::vector<GraphErrorSummary> per_graph;
  ErrorVector ev = summarize(all_planes, resolved[0].relerr, resolved[0].rmserr,
                             elapsed, &per_graph);
  if (resolved[0].verbose >= 0)
    print_error_report(ev, per_graph, resolved[0].verbose, std::cout);
  return {ev, std::move(results)};
}

std::pair<ErrorVector, ResultData> simulate(const SimConfig& cfg) {
  return simulate(std::vector<SimConfig>{cfg});
}

std::vector<ScanRow> scan_parameter(const ConfigFactory& make,
                                    const std::string& key,
                                    const std::vector<double>& values,
                                    const ScanExtract& extract) {
  require(bool(make), ErrKind::config, "scan_parameter needs a factory");
  require(!values.empty(), ErrKind::config, "scan_parameter needs values");
  std::vector<ScanRow> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SimConfig cfg = make({{key, values[i]}});
    cfg.seed = cfg.seed + 1 + i;  // fresh stream block per scanned value
    if (cfg.verbose < 1) cfg.verbose = -1;
    auto [ev, res] = simulate(cfg);
    (void)ev;
    const auto& graphs = res.seq[0].graphs;
    require(extract.graph >= 0 &&
                extract.graph < static_cast<int>(graphs.size()),
            ErrKind::config, "scan extract graph out of range");
    const GraphData& gd = graphs[static_cast<std::size_t>(extract.graph)];
    const int ti = extract.time_index < 0
                       ? static_cast<int>(gd.axis.size()) - 1
                       : extract.time_index;
    require(ti >= 0 && ti < static_cast<int>(gd.axis.size()), ErrKind::config,
            "scan extract time index out of range");
    require(extract.line >= 0 && extract.line < gd.values_per_point,
            ErrKind::config, "scan extract line out of range");
    ScanRow row;
    row.value = values[i];
    row.mean = gd.at(0, ti, extract.line);
    if (gd.has(1)) {
      row.step_error = gd.at(1, ti, extract.line);
      row.has_step = true;
    }
    if (gd.has(2)) {
      row.sampling = gd.at(2, ti, extract.line);
      row.has_sampling = true;
    }
    if (gd.has(3)) {
      row.comparison = gd.at(3, ti, extract.line);
      row.has_comparison = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<XcheckLevel> xcheck(int levels, const SimConfig& cfg) {
  XcheckRunner runner = [&cfg](int factor) {
    SimConfig c = cfg;
    if (c.grid.steps.empty()) c.grid.steps.push_back(1);
    c.grid.steps[0] *= factor;
    if (c.verbose < 1) c.verbose = -1;
    auto [ev, res] = simulate(c);
    (void)ev;
    const Grid g = build_grid(res.resolved[0].grid);
    return std::make_pair(g.dt / g.steps[0], result_planes(res, 0));
  };
  std::vector<XcheckLevel> table = xcheck(levels, runner);
  if (cfg.verbose >= 0) {
    for (std::size_t l = 0; l < table.size(); ++l) {
      const XcheckLevel& row = table[l];
      std::cout << "level " << (l + 1) << ": dt " << row.dt << ", max diff "
                << row.max_difference << ", step " << row.step_error
                << ", sampling " << row.sampling_error << "\n";
    }
  }
  return table;
}

}  // namespace stochastica
