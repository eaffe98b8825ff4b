#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "dilatox/ikeda.hpp"
#include "dilatox/mfi.hpp"
#include "dilatox/models.hpp"
#include "dilatox/simulate.hpp"
#include "dilatox/stationary.hpp"

namespace dilatox::cli {
namespace {

using models::State;

constexpr double kNormalizationTol = 1e-12;

// ---- output ----

class Outputs {
public:
    Outputs(const Context& ctx, Json resolved) : ctx_(ctx), resolved_(std::move(resolved)) {
        std::filesystem::create_directories(ctx_.out_dir);
    }

    void csv(const std::string& name, std::vector<std::string> columns,
             std::vector<std::vector<double>> rows) const {
        io::CsvTable t{io::provenance_comments(resolved_), std::move(columns), std::move(rows)};
        write(name, io::render_csv(t));
    }

    void json(const std::string& name, const Json& body) const {
        Json doc = Json::object();
        doc["dilatox_version"] = DILATOX_VERSION;
        doc["config"] = resolved_;
        for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
        write(name, io::dump_json(doc));
    }

    std::filesystem::path path(const std::string& name) const { return ctx_.out_dir / name; }

private:
    void write(const std::string& name, const std::string& content) const {
        io::write_file(path(name), content);
        ctx_.log << "wrote " << path(name).string() << "\n";
    }

    const Context& ctx_;
    Json resolved_;
};

std::vector<std::string> coordinate_columns(const std::string& stem, std::size_t dim) {
    if (dim == 1) return {stem};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dim; ++i) out.push_back(stem + std::to_string(i + 1));
    return out;
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---- shared readers ----

State read_state(const Section& s, const std::string& key) {
    const auto values = s.numbers(key);
    return s.checked([&] { return State(std::span<const double>(values)); });
}

numkit::ProductTruncation read_truncation(const Section& parent) {
    numkit::ProductTruncation t;
    if (const auto s = parent.optional_sub("truncation")) {
        t.tol = s->number("tol", t.tol);
        t.max_terms = s->count("max_terms", t.max_terms);
        s->checked([&] { t.validate(); });
    } else {
        parent.record("truncation", Json{{"tol", t.tol}, {"max_terms", t.max_terms}});
    }
    return t;
}

models::KuboAndersen read_ka(const Section& s, const std::string& prefix) {
    models::KuboAndersen ka;
    for (const auto& row : s.rows(prefix + "points")) {
        ka.points.push_back(s.checked([&] { return State(std::span<const double>(row)); }));
    }
    ka.probs = s.numbers(prefix + "probs");
    return ka;
}

numkit::Grid read_square_grid(const Section& s, const std::string& prefix, std::size_t dim, double lo,
                              double hi, std::size_t count) {
    const numkit::Axis a = s.axis(prefix, lo, hi, count);
    return numkit::Grid(std::vector<numkit::Axis>(dim, a));
}

numkit::Grid read_plane(const Section& s, double xlo, double xhi, double ylo, double yhi, std::size_t count) {
    return numkit::Grid::plane(s.axis("x", xlo, xhi, count), s.axis("y", ylo, yhi, count));
}

// ---- stationary ----

stationary::StationaryModel read_stationary_model(const Section& s) {
    const std::string kind = s.string("model");
    stationary::StationaryModel model;
    if (kind == "det") {
        model = stationary::LinearDetModel{read_state(s, "A"), s.number("kappa")};
    } else if (kind == "gauss") {
        model = stationary::LinearGaussModel{read_state(s, "A"), s.number("kappa"), s.number("R")};
    } else if (kind == "gauss_ka") {
        model = stationary::GaussKaModel{s.number("kappa"), s.number("R", 0.0), read_ka(s, "ka_")};
    } else {
        s.fail("model", "unknown model '" + kind + "'; expected det, gauss or gauss_ka");
    }
    s.checked([&] { stationary::validate(model); });
    return model;
}

struct StationaryRun {
    stationary::StationaryModel model;
    numkit::Grid grid;
    numkit::ProductTruncation trunc;
};

StationaryRun read_stationary(const Section& s) {
    StationaryRun run;
    run.model = read_stationary_model(s);
    const std::size_t dim = stationary::model_dim(run.model);
    const Section g = s.has("grid") ? s.sub("grid") : s;
    run.grid = g.checked([&] { return read_square_grid(g, "u", dim, -10.0, 10.0, 201); });
    run.trunc = read_truncation(s);
    return run;
}

int cmd_stationary(const Section& root, const Context& ctx) {
    const Section s = root.sub("stationary");
    const StationaryRun run = read_stationary(s);
    const std::size_t dim = stationary::model_dim(run.model);
    std::optional<numkit::Grid> xgrid;
    if (const auto d = s.optional_sub("density")) {
        xgrid = d->checked([&] { return read_square_grid(*d, "x", dim, -5.0, 5.0, 201); });
    }

    const auto cf = s.checked([&] { return stationary::charfn(run.model, run.grid, run.trunc); });
    const double residual = stationary::functional_residual_max(run.model, run.grid, run.trunc);
    const Outputs out(ctx, *ctx.resolved);

    std::vector<std::vector<double>> rows;
    rows.reserve(cf.grid.size());
    for (std::size_t i = 0; i < cf.grid.size(); ++i) {
        const auto p = cf.grid.point(i);
        std::vector<double> row(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(dim));
        row.push_back(cf.values[i].real());
        row.push_back(cf.values[i].imag());
        row.push_back(static_cast<double>(cf.terms_used[i]));
        rows.push_back(std::move(row));
    }
    auto columns = coordinate_columns("u", dim);
    columns.insert(columns.end(), {"re", "im", "terms"});
    out.csv("charfn.csv", columns, std::move(rows));

    Json report = Json::object();
    report["model"] = stationary::model_name(run.model);
    report["dim"] = dim;
    if (!cf.mean.empty()) report["mean"] = cf.mean;
    if (!cf.variance.empty()) report["variance"] = cf.variance;
    const auto max_terms = cf.terms_used.empty() ? std::size_t{0}
                                                 : *std::max_element(cf.terms_used.begin(), cf.terms_used.end());
    report["truncation"] = {{"tol", run.trunc.tol},
                            {"max_terms", run.trunc.max_terms},
                            {"max_terms_used", max_terms},
                            {"flagged", cf.flagged}};
    report["functional_residual_max"] = residual;

    if (xgrid) {
        const auto density = s.checked([&] { return stationary::density_from_charfn(cf, *xgrid); });
        std::vector<std::vector<double>> drows;
        for (std::size_t i = 0; i < xgrid->size(); ++i) {
            const auto p = xgrid->point(i);
            std::vector<double> row(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(dim));
            row.push_back(density.density.values[i]);
            drows.push_back(std::move(row));
        }
        auto dcols = coordinate_columns("x", dim);
        dcols.push_back("p");
        out.csv("density.csv", dcols, std::move(drows));
        report["density"] = {{"mass", density.mass},
                             {"boundary_max", density.boundary_max},
                             {"boundary_decay_ok", density.boundary_decay_ok},
                             {"warning", density.warning}};
        if (!density.warning.empty()) ctx.log << "warning: " << density.warning << "\n";
    }
    out.json("stationary.json", report);
    return kOk;
}

// ---- mfi ----

mfi::FractalSpec read_fractal(const Section& s, const Context& ctx) {
    const std::string preset = s.string("preset", "custom");
    const double kappa = s.number("kappa");
    if (preset == "ikeda") {
        if (!ctx.unchecked) {
            throw PolicyError(
                "mfi: the ikeda preset weights do not satisfy sum psi = L; rerun with --unchecked to accept them");
        }
        return s.checked([&] { return mfi::FractalSpec::ikeda_weights(kappa); });
    }
    std::vector<double> levels{0.0, 1.0};
    double lambda_star = 0.5;
    std::vector<std::complex<double>> weights;
    if (preset == "cantor") {
        weights = {1.0, 1.0};
    } else if (preset == "custom") {
        levels = s.numbers("levels", levels);
        lambda_star = s.number("lambda_star", lambda_star);
        if (s.has("weights")) {
            for (const auto& row : s.rows("weights")) {
                if (row.size() == 1) {
                    weights.emplace_back(row[0], 0.0);
                } else if (row.size() == 2) {
                    weights.emplace_back(row[0], row[1]);
                } else {
                    s.fail("weights", "each weight is [re] or [re, im]");
                }
            }
        } else {
            weights.assign(levels.size(), {1.0, 0.0});
        }
    } else {
        s.fail("preset", "unknown preset '" + preset + "'; expected cantor, ikeda or custom");
    }
    std::complex<double> total{};
    for (const auto& w : weights) total += w;
    const double defect = std::abs(total - std::complex<double>(static_cast<double>(weights.size()), 0.0));
    if (defect > kNormalizationTol && !ctx.unchecked) {
        throw PolicyError("mfi: weights violate sum psi = L (defect " + io::format_double(defect) +
                          "); rerun with --unchecked to accept them");
    }
    const auto check = ctx.unchecked ? mfi::WeightCheck::kUnchecked : mfi::WeightCheck::kEnforced;
    return s.checked([&] { return mfi::FractalSpec(levels, kappa, lambda_star, weights, check); });
}

mfi::Function1D read_function(const Section& parent) {
    if (!parent.has("function")) {
        parent.record("function", Json{{"kind", "const"}, {"value", 1.0}});
        return [](double) { return std::complex<double>(1.0, 0.0); };
    }
    const Section s = parent.sub("function");
    const std::string kind = s.string("kind");
    if (kind == "const") {
        const double v = s.number("value", 1.0);
        return [v](double) { return std::complex<double>(v, 0.0); };
    }
    if (kind == "power") {
        const auto k = static_cast<int>(s.count("k", 1));
        return [k](double x) { return std::complex<double>(std::pow(x, k), 0.0); };
    }
    if (kind == "cos" || kind == "sin" || kind == "exp_i") {
        const double w = s.number("omega", 1.0);
        if (kind == "cos") return [w](double x) { return std::complex<double>(std::cos(w * x), 0.0); };
        if (kind == "sin") return [w](double x) { return std::complex<double>(std::sin(w * x), 0.0); };
        return [w](double x) { return std::polar(1.0, w * x); };
    }
    s.fail("kind", "unknown function '" + kind + "'; expected const, power, cos, sin or exp_i");
}

int cmd_mfi(const Section& root, const Context& ctx) {
    const Section s = root.sub("mfi");
    const mfi::FractalSpec spec = read_fractal(s, ctx);
    const mfi::Function1D f = read_function(s);
    mfi::MfiOptions options;
    options.tol = s.number("tol", options.tol);
    options.n_max = s.count("n_max", options.n_max);
    if (const auto M = s.optional_number("M")) options.derivative_bound = *M;
    const std::string method = s.string("method", "sigma");
    const auto trunc = read_truncation(s);
    const auto prefractal_n = s.optional_count("prefractal_n");
    const auto moments = s.optional_count("moments");
    std::optional<numkit::Grid> omega_grid;
    if (const auto c = s.optional_sub("charfn")) {
        omega_grid = numkit::Grid({c->axis("omega", -50.0, 50.0, 201)});
    }

    mfi::MfiResult result;
    double kappa_y = 0.0;
    if (method == "sigma") {
        result = s.checked([&] { return mfi::mfi_eval(spec, f, options); });
    } else if (method == "box") {
        result = s.checked([&] { return mfi::mfi_box_eval(spec, f, options); });
    } else if (method == "2d") {
        kappa_y = s.number("kappa_y", 0.5);
        const auto f2 = [&f](double x, double) { return f(x); };
        result = s.checked([&] { return mfi::mfi_2d_eval(spec, spec.kappa(), kappa_y, f2, options); });
    } else {
        s.fail("method", "unknown method '" + method + "'; expected sigma, box or 2d");
    }

    const Outputs out(ctx, *ctx.resolved);
    std::vector<std::vector<double>> rows;
    for (const auto& step : result.trace) {
        std::vector<double> row{static_cast<double>(step.n), step.value.real(), step.value.imag(), step.gap};
        if (options.derivative_bound) row.push_back(step.bound ? *step.bound : std::nan(""));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> cols{"n", "re", "im", "gap"};
    if (options.derivative_bound) cols.push_back("bound");
    out.csv("mfi_trace.csv", cols, std::move(rows));

    Json report = Json::object();
    report["value"] = complex_json(result.value);
    report["n_final"] = result.n_final;
    report["cauchy_gap"] = result.cauchy_gap;
    report["bound_theorem2"] = optional_json(result.bound_theorem2);
    report["converged"] = result.converged;
    report["normalization_defect"] = result.normalization_defect;
    report["weight_bound_G"] = mfi::weight_bound(spec).g;
    const auto dims = mfi::dimensions(spec.kappa(), method == "2d" ? kappa_y : 0.5);
    report["dimension"] = {{"d_x", optional_json(dims.d_x)}, {"d", dims.d}};
    Json trace = Json::array();
    for (const auto& step : result.trace) {
        trace.push_back({{"n", step.n},
                         {"value", complex_json(step.value)},
                         {"gap", std::isnan(step.gap) ? Json(nullptr) : Json(step.gap)},
                         {"bound", optional_json(step.bound)}});
    }
    report["trace"] = trace;

    if (moments) {
        Json m = Json::array();
        for (unsigned k = 0; k <= *moments; ++k) {
            m.push_back(complex_json(mfi::fourier_moment(spec, k, trunc)));
        }
        report["fourier_moments"] = m;
    }
    if (prefractal_n) {
        const auto set = s.checked([&] { return mfi::prefractal(spec, *prefractal_n); });
        std::vector<std::vector<double>> prow;
        prow.reserve(set.points.size());
        for (const auto& p : set.points) prow.push_back({p.lambda, p.theta.real(), p.theta.imag()});
        out.csv("prefractal.csv", {"lambda", "theta_re", "theta_im"}, std::move(prow));
    }
    if (omega_grid) {
        const auto m = mfi::measure_charfn(spec, *omega_grid, trunc);
        std::vector<std::vector<double>> crow;
        for (std::size_t i = 0; i < omega_grid->size(); ++i) {
            crow.push_back({omega_grid->axis(0)[i], m.values.values[i].real(), m.values.values[i].imag(),
                            static_cast<double>(m.terms_used[i])});
        }
        out.csv("measure_charfn.csv", {"omega", "re", "im", "terms"}, std::move(crow));
        report["measure_charfn_flagged"] = m.flagged;
    }
    out.json("mfi.json", report);
    return kOk;
}

// ---- ikeda ----

struct PStConfig {
    double R = 0.1;
    numkit::Grid grid;
    ikeda::PStOptions options;
};

struct IkedaRun {
    double kappa = 0.3;
    std::vector<double> rgrid;
    numkit::ProductTruncation trunc;
    ikeda::HankelOptions hankel;
    std::optional<PStConfig> pst;
};

IkedaRun read_ikeda(const Section& s) {
    IkedaRun run;
    run.kappa = s.number("kappa");
    s.checked([&] { ikeda::attractor_radius(run.kappa); });
    const double reach = 1.05 * ikeda::attractor_radius(run.kappa);
    const numkit::Axis r = s.axis("r", 0.0, reach, 451);
    if (r.lo < 0.0) s.fail("r_min", "radii must be >= 0");
    for (std::size_t i = 0; i < r.count; ++i) run.rgrid.push_back(r[i]);
    run.trunc = read_truncation(s);
    run.hankel.quad_tol = s.number("quad_tol", run.hankel.quad_tol);
    if (const auto p = s.optional_sub("pst")) {
        PStConfig c;
        c.R = p->number("R");
        c.grid = p->checked([&] { return read_plane(*p, 1.0 - 1.6, 1.0 + 1.6, -1.6, 1.6, 81); });
        c.options.trunc = run.trunc;
        c.options.hankel = run.hankel;
        c.options.radial_points = p->count("radial_points", c.options.radial_points);
        run.pst = c;
    }
    return run;
}

std::vector<std::vector<double>> plane_rows(const numkit::RealGridFunction& f) {
    std::vector<std::vector<double>> rows;
    rows.reserve(f.grid.size());
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const auto p = f.grid.point(i);
        rows.push_back({p[0], p[1], f.values[i]});
    }
    return rows;
}

int cmd_ikeda(const Section& root, const Context& ctx) {
    const Section s = root.sub("ikeda");
    const IkedaRun run = read_ikeda(s);
    const auto pch = s.checked([&] { return ikeda::p_ch(run.kappa, run.rgrid, run.trunc, run.hankel); });
    const Outputs out(ctx, *ctx.resolved);
    const auto clipped = pch.clipped();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < pch.r.size(); ++i) {
        rows.push_back({pch.r[i], clipped[i], pch.density[i], pch.cdf[i]});
    }
    out.csv("p_ch.csv", {"r", "density", "density_raw", "cdf"}, std::move(rows));

    Json report = Json::object();
    report["kappa"] = run.kappa;
    report["attractor_radius"] = ikeda::attractor_radius(run.kappa);
    report["p_ch"] = {{"mass", pch.mass},
                      {"cdf_end", pch.cdf.back()},
                      {"min_unclipped", pch.min_unclipped},
                      {"beta_max", pch.beta_max},
                      {"nodes", pch.nodes}};
    if (run.pst) {
        const auto pst = s.checked([&] { return ikeda::p_st_ikeda(run.kappa, run.pst->R, run.pst->grid, run.pst->options); });
        out.csv("p_st.csv", {"x", "y", "density"}, plane_rows(pst.density));
        report["p_st"] = {{"R", run.pst->R},
                          {"mass", pst.mass},
                          {"gaussian_std", pst.gaussian_std},
                          {"min_unclipped", pst.min_unclipped}};
    }
    out.json("ikeda.json", report);
    return kOk;
}

// ---- simulate ----

models::MapSpec read_map(const Section& s) {
    const std::string kind = s.string("kind");
    models::MapSpec map;
    if (kind == "linear") {
        map = models::LinearDet{read_state(s, "A"), s.number("kappa")};
    } else if (kind == "ikeda") {
        map = models::Ikeda{s.number("kappa"), s.number("lambda"), s.number("theta0", 0.0)};
    } else {
        s.fail("kind", "unknown map '" + kind + "'; expected linear or ikeda");
    }
    s.checked([&] { models::validate(map); });
    return map;
}

models::NoiseSpec read_noise(const Section& s, std::size_t dim) {
    const std::string kind = s.string("kind", "none");
    models::NoiseSpec noise;
    if (kind == "none") {
        noise = models::NoNoise{};
    } else if (kind == "gaussian") {
        noise = models::GaussianNoise{s.number("R")};
    } else if (kind == "ka") {
        noise = read_ka(s, "");
    } else if (kind == "ou") {
        noise = models::OrnsteinUhlenbeck{s.number("R"), s.number("tau_cor"), s.number("T_del", 1.0)};
    } else if (kind == "mixed") {
        noise = models::MixedNoise{models::GaussianNoise{s.number("R")}, read_ka(s, "")};
    } else {
        s.fail("kind", "unknown noise '" + kind + "'; expected none, gaussian, ka, ou or mixed");
    }
    s.checked([&] { models::validate(noise, dim); });
    return noise;
}

struct SimulateRun {
    simulate::EnsembleSpec spec;
    simulate::SummaryOptions summary;
    bool write_samples = false;
};

SimulateRun read_simulate(const Section& s, const Context& ctx) {
    SimulateRun run;
    auto& e = run.spec;
    e.map = read_map(s.sub("map"));
    const std::size_t dim = models::state_dim(e.map);
    if (s.has("noise")) {
        e.noise = read_noise(s.sub("noise"), dim);
    } else {
        s.record("noise", Json{{"kind", "none"}});
    }
    e.chains = s.count("chains", e.chains);
    e.steps = s.count("steps", e.steps);
    e.burn_in = s.count("burn_in", e.burn_in);
    e.thin = s.count("thin", e.thin);
    e.seed = s.u64("seed", e.seed);
    if (ctx.seed) {
        e.seed = *ctx.seed;
        s.record("seed", e.seed);
    }
    if (s.has("x0")) e.x0 = read_state(s, "x0");
    s.checked([&] { e.validate(); });
    run.write_samples = s.boolean("write_samples", false);
    if (const auto m = s.optional_sub("summary")) {
        if (m->has("center")) run.summary.center = read_state(*m, "center");
        run.summary.radial_bins = m->optional_count("radial_bins");
        if (const auto h = m->optional_sub("hist2d")) {
            run.summary.histogram2d = h->checked([&] { return read_plane(*h, -2.0, 2.0, -2.0, 2.0, 81); });
        }
        if (const auto c = m->optional_sub("charfn")) {
            run.summary.charfn_grid = c->checked([&] { return read_square_grid(*c, "u", dim, -5.0, 5.0, 101); });
        }
        if (run.summary.center && run.summary.center->dim() != dim) {
            m->fail("center", "dimension does not match the map");
        }
        if (run.summary.histogram2d && dim != 2) m->fail("hist2d", "requires a two-dimensional map");
    }
    return run;
}

Json summary_json(const simulate::EmpiricalSummary& sum) {
    Json j = Json::object();
    j["count"] = sum.count;
    j["dim"] = sum.dim;
    j["mean"] = sum.mean;
    j["variance"] = sum.variance;
    j["center"] = std::vector<double>(sum.center.span().begin(), sum.center.span().end());
    j["radial_histogram"] = {{"lo", sum.radial.lo}, {"width", sum.radial.width}, {"bins", sum.radial.density.size()}};
    const auto& r = sum.radii_sorted;
    auto quantile = [&r](double q) { return r[static_cast<std::size_t>(q * static_cast<double>(r.size() - 1))]; };
    j["radius_quantiles"] = {{"min", r.front()}, {"median", quantile(0.5)}, {"max", r.back()}};
    if (sum.histogram2d) j["histogram2d"] = {{"outside", sum.histogram2d->outside}};
    return j;
}

int cmd_simulate(const Section& root, const Context& ctx) {
    const Section s = root.sub("simulate");
    const SimulateRun run = read_simulate(s, ctx);
    const auto samples = simulate::run_samples(run.spec);
    const auto sum = s.checked([&] { return simulate::summarize(samples, run.summary); });
    const Outputs out(ctx, *ctx.resolved);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < sum.radial.density.size(); ++k) {
        const double lo = sum.radial.lo + sum.radial.width * static_cast<double>(k);
        rows.push_back({lo, lo + sum.radial.width, sum.radial.density[k]});
    }
    out.csv("radial_hist.csv", {"r_lo", "r_hi", "density"}, std::move(rows));
    if (sum.histogram2d) {
        numkit::RealGridFunction h(sum.histogram2d->centers);
        h.values = sum.histogram2d->density;
        out.csv("hist2d.csv", {"x", "y", "density"}, plane_rows(h));
    }
    if (sum.charfn) {
        std::vector<std::vector<double>> crow;
        for (std::size_t i = 0; i < sum.charfn->grid.size(); ++i) {
            const auto p = sum.charfn->grid.point(i);
            std::vector<double> row(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(sum.dim));
            row.push_back(sum.charfn->values[i].real());
            row.push_back(sum.charfn->values[i].imag());
            crow.push_back(std::move(row));
        }
        auto cols = coordinate_columns("u", sum.dim);
        cols.insert(cols.end(), {"re", "im"});
        out.csv("charfn.csv", cols, std::move(crow));
    }
    if (run.write_samples) {
        simulate::write_samples_binary(out.path("samples.bin").string(), samples);
        ctx.log << "wrote " << out.path("samples.bin").string() << "\n";
    }
    out.json("summary.json", Json{{"summary", summary_json(sum)}});
    return kOk;
}

// ---- compare ----

std::filesystem::path resolve_path(const Section& s, const std::string& key) {
    std::filesystem::path p = s.string(key);
    if (p.is_relative()) p = s.origin().parent_path() / p;
    return p;
}

bool is_json_path(const std::filesystem::path& p) { return p.extension() == ".json"; }

int cmd_compare(const Section& root, const Context& ctx) {
    const Section c = root.sub("compare");
    const auto a_path = resolve_path(c, "analytic");
    const auto b_path = resolve_path(c, "empirical");
    struct Thresholds {
        std::optional<double> ks, l1, cf_sup;
    } limits;
    if (const auto t = c.optional_sub("thresholds")) {
        limits.ks = t->optional_number("ks");
        limits.l1 = t->optional_number("l1");
        limits.cf_sup = t->optional_number("cf_sup");
    }

    auto resolved_a = std::make_shared<Json>(Json::object());
    auto resolved_b = std::make_shared<Json>(Json::object());
    const Section ra = root_section(load_document(a_path, is_json_path(a_path)), resolved_a);
    const Section rb = root_section(load_document(b_path, is_json_path(b_path)), resolved_b);
    SimulateRun sim = read_simulate(rb.sub("simulate"), ctx);
    const std::size_t dim = models::state_dim(sim.spec.map);

    simulate::AnalyticTarget target;
    std::optional<IkedaRun> ik;
    if (ra.has("stationary")) {
        const Section s = ra.sub("stationary");
        const StationaryRun st = read_stationary(s);
        if (stationary::model_dim(st.model) != dim) {
            throw ConfigError("compare: analytic model and simulation have different dimensions");
        }
        target.charfn = s.checked([&] { return stationary::charfn(st.model, st.grid, st.trunc); }).as_grid_function();
        sim.summary.charfn_grid = st.grid;
    } else if (ra.has("ikeda")) {
        ik = read_ikeda(ra.sub("ikeda"));
        if (dim != 2) throw ConfigError("compare: the ikeda analytic side needs a two-dimensional simulation");
        sim.summary.center = State{1.0, 0.0};
    } else {
        throw ConfigError("compare: analytic config " + a_path.string() + " has neither [stationary] nor [ikeda]");
    }

    const auto samples = simulate::run_samples(sim.spec);
    if (ik) {
        const auto* gauss = std::get_if<models::GaussianNoise>(&sim.spec.noise);
        if (std::holds_alternative<models::NoNoise>(sim.spec.noise)) {
            target.radial = ikeda::p_ch(ik->kappa, ik->rgrid, ik->trunc, ik->hankel);
        } else if (gauss && ik->pst) {
            if (std::fabs(gauss->R - ik->pst->R) > 1e-12 * gauss->R) {
                throw ConfigError("compare: [ikeda.pst] R differs from the simulated Gaussian noise R");
            }
            double reach = ik->rgrid.back();
            for (const auto& x : samples) reach = std::max(reach, std::hypot(x[0] - 1.0, x[1]));
            std::vector<double> radii(ik->rgrid.size());
            for (std::size_t i = 0; i < radii.size(); ++i) {
                radii[i] = reach * static_cast<double>(i) / static_cast<double>(radii.size() - 1);
            }
            target.radial = ikeda::p_st_radial(ik->kappa, ik->pst->R, radii, ik->trunc, ik->hankel);
            target.density2d = ikeda::p_st_ikeda(ik->kappa, ik->pst->R, ik->pst->grid, ik->pst->options).density;
            sim.summary.histogram2d = ik->pst->grid;
        } else {
            throw ConfigError("compare: ikeda comparisons need no noise, or Gaussian noise with [ikeda.pst]");
        }
    }
    const auto sum = simulate::summarize(samples, sim.summary);
    const auto metrics = simulate::compare(target, sum);

    bool pass = true;
    Json checks = Json::object();
    auto check = [&](const char* name, const std::optional<double>& value, const std::optional<double>& limit) {
        if (!limit) return;
        const bool ok = value && *value < *limit;
        pass = pass && ok;
        checks[name] = {{"value", optional_json(value)}, {"threshold", *limit}, {"pass", ok}};
    };
    check("ks", metrics.ks, limits.ks);
    check("l1", metrics.l1, limits.l1);
    check("cf_sup", metrics.cf_sup, limits.cf_sup);

    Json resolved = *ctx.resolved;
    resolved["analytic_config"] = *resolved_a;
    resolved["empirical_config"] = *resolved_b;
    const Outputs out(ctx, resolved);
    Json report = Json::object();
    report["metrics"] = {{"cf_sup", optional_json(metrics.cf_sup)},
                         {"ks", optional_json(metrics.ks)},
                         {"l1", optional_json(metrics.l1)}};
    report["samples"] = sum.count;
    report["checks"] = checks;
    report["pass"] = pass;
    out.json("compare.json", report);
    if (!pass) ctx.log << "compare: metrics exceed the configured thresholds\n";
    return pass ? kOk : kNumericalFailure;
}

}  // namespace

int dispatch(const std::string& command, const Section& root, const Context& ctx) {
    if (command == "stationary") return cmd_stationary(root, ctx);
    if (command == "mfi") return cmd_mfi(root, ctx);
    if (command == "ikeda") return cmd_ikeda(root, ctx);
    if (command == "simulate") return cmd_simulate(root, ctx);
    if (command == "compare") return cmd_compare(root, ctx);
    throw ConfigError("unknown command " + command);
}

}  // namespace dilatox::cli
