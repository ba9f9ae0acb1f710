#include "twostrain/dynamics.hpp"

#include "twostrain/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace twostrain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_scale(double cap) { return cap > 0.0 ? cap : 1.0; }

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

InfectionForces infection_forces(const ModelParams& params, const EpidemicState& state) {
    const auto& grid = params.grid;
    const std::size_t n = grid.size();
    if (state.nodes() != n) throw InvalidArgument("state does not live on the model grid");
    std::vector<double> mstar(n);
    params.mosquitoes.evaluate(state.time(), mstar);
    InfectionForces f{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                      std::vector<double>(n)};
    const auto I1 = state.field(kI1);
    const auto V1 = state.field(kIv1);
    const auto I2 = state.field(kI2);
    const auto V2 = state.field(kIv2);
    const double p = params.p;
    const double l = params.l;
    const double c1 = params.strains[0].c, a1 = params.strains[0].alpha;
    const double c2 = params.strains[1].c, a2 = params.strains[1].alpha;
    for (std::size_t k = 0; k < n; ++k) {
        const double N = params.humans[k];
        const double slack = 1e-12 * N;
        if (I1[k] < 0.0 || I2[k] < 0.0 || V1[k] < 0.0 || V2[k] < 0.0 || I1[k] + I2[k] > N + slack ||
            V1[k] + V2[k] > mstar[k] + 1e-12 * safe_scale(mstar[k])) {
            throw InvalidArgument("infection_forces: state outside the admissible box at node " +
                                  std::to_string(k));
        }
        const double b = params.beta(state.time(), grid.node(k));
        const double S = N - I1[k] - I2[k];
        const double den = p * (I1[k] + I2[k]) + l * S;
        f.j1[k] = c1 * b * l * S / den;
        f.j2[k] = a1 * b * p * I1[k] / den;
        f.j3[k] = c2 * b * l * S / den;
        f.j4[k] = a2 * b * p * I2[k] / den;
    }
    return f;
}

TwoStrainModel::TwoStrainModel(ModelParams params, double clamp_tolerance)
    : params_((params.validate(), std::move(params))),
      clamp_tolerance_(clamp_tolerance),
      full_stepper_(params_.grid, params_.grid.size(),
                    {params_.diffusion_h, params_.diffusion_v, params_.diffusion_h, params_.diffusion_v},
                    params_.dt()),
      single_stepper_(params_.grid, params_.grid.size(), {params_.diffusion_h, params_.diffusion_v},
                      params_.dt()) {
    const std::size_t n = nodes();
    const std::size_t steps = steps_per_period();
    beta_.resize(steps * n);
    eta_.resize(steps * n);
    mstar_.resize(steps * n);
    const auto beta = params_.beta.sampler(params_.grid);
    const auto eta = params_.eta.sampler(params_.grid);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = time_of(static_cast<std::int64_t>(j));
        std::span<double> b(beta_.data() + j * n, n);
        std::span<double> e(eta_.data() + j * n, n);
        beta(t, b);
        eta(t, e);
        params_.mosquitoes.evaluate_step(j, steps, std::span<double>(mstar_.data() + j * n, n));
        for (std::size_t k = 0; k < n; ++k) {
            if (!(b[k] >= 0.0) || !(e[k] >= 0.0)) {
                throw InvalidArgument("beta and eta must be nonnegative on the step grid");
            }
        }
    }
}

TwoStrainModel::Workspace TwoStrainModel::make_workspace() const {
    return Workspace{full_stepper_.make_workspace(), single_stepper_.make_workspace()};
}

std::span<const double> TwoStrainModel::row(const std::vector<double>& table, std::int64_t j) const {
    const std::size_t n = nodes();
    const auto steps = static_cast<std::int64_t>(steps_per_period());
    const auto r = static_cast<std::size_t>(((j % steps) + steps) % steps);
    return {table.data() + r * n, n};
}

StepDiagnostics TwoStrainModel::project(std::span<double> values, std::int64_t j,
                                        std::size_t strains) const {
    const std::size_t n = nodes();
    const auto M = mosquitoes_at(j);
    const auto& N = params_.humans;
    StepDiagnostics d;
    auto human = [&](std::size_t s) { return values.subspan(2 * s * n, n); };
    auto vector = [&](std::size_t s) { return values.subspan((2 * s + 1) * n, n); };
    for (std::size_t k = 0; k < n; ++k) {
        const double sh = safe_scale(N[k]);
        const double sv = safe_scale(M[k]);
        double hsum = 0.0;
        double vsum = 0.0;
        for (std::size_t s = 0; s < strains; ++s) {
            d.raw_violation = std::max({d.raw_violation, -human(s)[k] / sh, -vector(s)[k] / sv});
            hsum = s == 0 ? human(s)[k] : hsum + human(s)[k];
            vsum = s == 0 ? vector(s)[k] : vsum + vector(s)[k];
        }
        d.raw_violation = std::max({d.raw_violation, (hsum - N[k]) / sh, (vsum - M[k]) / sv});
    }
    if (d.raw_violation > clamp_tolerance_) {
        std::ostringstream msg;
        msg << "state left the admissible box by " << d.raw_violation
            << " (relative) at step " << j << "; the configuration is numerically unstable";
        throw InvariantViolation(msg.str());
    }
    if (d.raw_violation > 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
            double hsum = 0.0;
            double vsum = 0.0;
            for (std::size_t s = 0; s < strains; ++s) {
                human(s)[k] = std::max(human(s)[k], 0.0);
                vector(s)[k] = std::max(vector(s)[k], 0.0);
                hsum = s == 0 ? human(s)[k] : hsum + human(s)[k];
                vsum = s == 0 ? vector(s)[k] : vsum + vector(s)[k];
            }
            if (hsum > N[k]) {
                const double factor = N[k] / hsum;
                for (std::size_t s = 0; s < strains; ++s) human(s)[k] *= factor;
            }
            if (vsum > M[k]) {
                const double factor = vsum > 0.0 ? M[k] / vsum : 0.0;
                for (std::size_t s = 0; s < strains; ++s) vector(s)[k] *= factor;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        double hsum = 0.0;
        double vsum = 0.0;
        for (std::size_t s = 0; s < strains; ++s) {
            hsum += human(s)[k];
            vsum += vector(s)[k];
        }
        d.residual = std::max({d.residual, (hsum - N[k]) / safe_scale(N[k]),
                               (vsum - M[k]) / safe_scale(M[k])});
    }
    return d;
}

StepDiagnostics TwoStrainModel::step(EpidemicState& state, Workspace& ws) const {
    const std::size_t n = nodes();
    const auto& N = params_.humans;
    const double p = params_.p;
    const double l = params_.l;
    const double h1 = params_.death + params_.strains[0].gamma;
    const double h2 = params_.death + params_.strains[1].gamma;
    const double c1 = params_.strains[0].c, a1 = params_.strains[0].alpha;
    const double c2 = params_.strains[1].c, a2 = params_.strains[1].alpha;
    auto reaction = [&](std::int64_t j, std::span<const double> y, std::span<double> rate) {
        const auto beta = beta_at(j);
        const auto eta = eta_at(j);
        const auto M = mosquitoes_at(j);
        for (std::size_t k = 0; k < n; ++k) {
            const double I1 = y[k];
            const double V1 = y[n + k];
            const double I2 = y[2 * n + k];
            const double V2 = y[3 * n + k];
            const double b = beta[k];
            const double S = N[k] - I1 - I2;
            const double den = p * (I1 + I2) + l * S;
            const double Sv = M[k] - V1 - V2;
            rate[k] = -h1 * I1 + c1 * b * l * S / den * V1;
            rate[n + k] = -eta[k] * V1 + a1 * b * p * I1 / den * Sv;
            rate[2 * n + k] = -h2 * I2 + c2 * b * l * S / den * V2;
            rate[3 * n + k] = -eta[k] * V2 + a2 * b * p * I2 / den * Sv;
        }
    };
    const std::int64_t j = state.step();
    full_stepper_.step(j, state.values(), reaction, ws.full);
    const auto d = project(state.values(), j + 1, 2);
    state.set_clock(j + 1, time_of(j + 1));
    return d;
}

EpidemicState TwoStrainModel::step_full(const EpidemicState& state) const {
    EpidemicState next = state;
    auto ws = make_workspace();
    step(next, ws);
    return next;
}

StepDiagnostics TwoStrainModel::step_single(Strain s, std::span<double> pair, std::int64_t j,
                                            Workspace& ws) const {
    const std::size_t n = nodes();
    const auto& N = params_.humans;
    const double p = params_.p;
    const double l = params_.l;
    const auto& sp = params_.strain(s);
    const double h = params_.death + sp.gamma;
    const double c = sp.c, a = sp.alpha;
    auto reaction = [&](std::int64_t jj, std::span<const double> y, std::span<double> rate) {
        const auto beta = beta_at(jj);
        const auto eta = eta_at(jj);
        const auto M = mosquitoes_at(jj);
        for (std::size_t k = 0; k < n; ++k) {
            const double I = y[k];
            const double V = y[n + k];
            const double b = beta[k];
            const double S = N[k] - I;
            const double den = p * I + l * S;
            const double Sv = M[k] - V;
            rate[k] = -h * I + c * b * l * S / den * V;
            rate[n + k] = -eta[k] * V + a * b * p * I / den * Sv;
        }
    };
    single_stepper_.step(j, pair, reaction, ws.single);
    return project(pair, j + 1, 1);
}

double TwoStrainModel::box_residual(const EpidemicState& state) const {
    const std::size_t n = nodes();
    std::vector<double> M(n);
    params_.mosquitoes.evaluate_step(static_cast<std::size_t>(state.step() % static_cast<std::int64_t>(steps_per_period())),
                                     steps_per_period(), M);
    double r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double sh = safe_scale(params_.humans[k]);
        const double sv = safe_scale(M[k]);
        for (std::size_t c : {kI1, kI2}) r = std::max(r, -state.field(c)[k] / sh);
        for (std::size_t c : {kIv1, kIv2}) r = std::max(r, -state.field(c)[k] / sv);
        r = std::max(r, (state.field(kI1)[k] + state.field(kI2)[k] - params_.humans[k]) / sh);
        r = std::max(r, (state.field(kIv1)[k] + state.field(kIv2)[k] - M[k]) / sv);
    }
    return r;
}

EpidemicState figure_initial_state(const SpatialGrid& grid) {
    EpidemicState s(grid.size(), 0, 0.0);
    const double amp[kComponents] = {6.0, 10.0, 5.0, 8.0};
    for (std::size_t c = 0; c < kComponents; ++c) {
        auto f = s.field(c);
        for (std::size_t k = 0; k < grid.size(); ++k) f[k] = amp[c] * (1.0 + std::cos(2.0 * grid.node(k)));
    }
    return s;
}

PersistenceMonitor::PersistenceMonitor(double burn_in) : burn_in_(burn_in) {
    acc_.floor.fill(kInf);
    acc_.ceiling.fill(-kInf);
}

void PersistenceMonitor::observe(const EpidemicState& state) {
    if (state.time() < burn_in_) return;
    for (std::size_t c = 0; c < kComponents; ++c) {
        const auto f = state.field(c);
        const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        acc_.floor[c] = std::min(acc_.floor[c], *lo);
        acc_.ceiling[c] = std::max(acc_.ceiling[c], *hi);
    }
    ++acc_.samples;
}

PersistenceMetrics PersistenceMonitor::metrics() const { return acc_; }

PersistenceMetrics persistence_metrics(std::span<const EpidemicState> trajectory, double burn_in) {
    PersistenceMonitor monitor(burn_in);
    for (const auto& s : trajectory) monitor.observe(s);
    return monitor.metrics();
}

TrajectorySummary simulate(const TwoStrainModel& model, EpidemicState initial,
                           const SimulationOptions& options, const Recorder& recorder) {
    if (initial.nodes() != model.nodes()) throw InvalidArgument("initial state does not match the grid");
    const double first_residual = model.box_residual(initial);
    if (first_residual > 1e-12) throw InvalidArgument("initial state lies outside X(0)");

    TrajectorySummary summary;
    summary.max_residual = std::max(0.0, first_residual);
    PersistenceMonitor monitor(options.burn_in);
    auto ws = model.make_workspace();
    EpidemicState state = std::move(initial);
    const auto end_step = static_cast<std::int64_t>(std::llround(options.t_end / model.dt()));

    std::array<bool, kComponents> seen_nonzero{};
    auto audit_positivity = [&](const EpidemicState& s, bool check) {
        for (std::size_t c = 0; c < kComponents; ++c) {
            const auto f = s.field(c);
            if (check && seen_nonzero[c] && *std::min_element(f.begin(), f.end()) <= 0.0) {
                summary.positivity_ok = false;
            }
            if (std::any_of(f.begin(), f.end(), [](double v) { return v != 0.0; })) seen_nonzero[c] = true;
        }
    };

    audit_positivity(state, false);
    monitor.observe(state);
    if (recorder) recorder(state);
    while (state.step() < end_step) {
        const auto d = model.step(state, ws);
        summary.max_raw_violation = std::max(summary.max_raw_violation, d.raw_violation);
        summary.max_residual = std::max(summary.max_residual, d.residual);
        audit_positivity(state, true);
        monitor.observe(state);
        ++summary.steps;
        if (recorder && options.record_stride > 0 &&
            summary.steps % static_cast<std::int64_t>(options.record_stride) == 0) {
            recorder(state);
        }
    }
    summary.persistence = monitor.metrics();
    summary.final_state = std::move(state);
    return summary;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::DiseaseFree: return "disease-free";
        case Regime::Coexistence: return "coexistence";
        case Regime::SensitiveOnly: return "strain-1 excludes strain-2";
        case Regime::ResistantOnly: return "strain-2 excludes strain-1";
    }
    return "unknown";
}

Regime classify(const PersistenceMetrics& m, double threshold) {
    const bool gone1 = m.ceiling[kI1] < threshold && m.ceiling[kIv1] < threshold;
    const bool gone2 = m.ceiling[kI2] < threshold && m.ceiling[kIv2] < threshold;
    if (gone1 && gone2) return Regime::DiseaseFree;
    if (gone2) return Regime::SensitiveOnly;
    if (gone1) return Regime::ResistantOnly;
    return Regime::Coexistence;
}

SingleStrainOrbit single_strain_periodic_orbit(const TwoStrainModel& model, Strain s,
                                               const OrbitOptions& options, bool expect_positive) {
    const std::size_t n = model.nodes();
    const std::size_t steps = model.steps_per_period();
    const auto& N = model.params().humans;
    const auto M0 = model.mosquitoes_at(0);
    std::vector<double> pair(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        pair[k] = options.initial_fraction * N[k];
        pair[n + k] = options.initial_fraction * M0[k];
    }
    const double scale = std::max(sup_norm(N), sup_norm(M0));
    auto ws = model.make_workspace();
    std::vector<double> previous(2 * n);

    auto run_period = [&](std::vector<double>* rows) {
        for (std::size_t j = 0; j < steps; ++j) {
            model.step_single(s, pair, static_cast<std::int64_t>(j), ws);
            if (rows) std::copy(pair.begin(), pair.end(), rows->begin() + static_cast<std::ptrdiff_t>((j + 1) * 2 * n));
        }
    };

    SingleStrainOrbit out{PeriodicOrbit::constant(model.params().period, std::vector<double>(2 * n, 0.0))};
    bool converged = false;
    for (std::size_t period = 1; period <= options.max_periods; ++period) {
        previous = pair;
        run_period(nullptr);
        out.periods = period;
        const double size = sup_norm(pair);
        if (size < options.zero_threshold * scale) {
            if (expect_positive) {
                throw InvariantViolation("strain " + to_string(s) +
                                         " decayed to zero although a positive orbit was expected");
            }
            out.trivial = true;
            return out;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < pair.size(); ++i) change = std::max(change, std::abs(pair[i] - previous[i]));
        if (change <= options.tolerance * size) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("single-strain orbit for strain " + to_string(s) + " not converged in " +
                               std::to_string(options.max_periods) + " periods");
    }
    std::vector<double> rows((steps + 1) * 2 * n);
    std::copy(pair.begin(), pair.end(), rows.begin());
    run_period(&rows);
    out.orbit = PeriodicOrbit(model.params().period, steps, 2 * n, std::move(rows));
    return out;
}

}  // namespace twostrain
