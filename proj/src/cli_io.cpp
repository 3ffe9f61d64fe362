#include "rieszlab/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rieszlab {

namespace {

// ---------------------------------------------------------------- strings

const char* generator_name(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::Explicit: return "explicit";
        case GeneratorKind::SyntheticPolynomial: return "synthetic_polynomial";
        case GeneratorKind::WavePerturbed: return "wave_perturbed";
    }
    return "?";
}

GeneratorKind generator_from(const std::string& s) {
    if (s == "explicit") return GeneratorKind::Explicit;
    if (s == "synthetic_polynomial") return GeneratorKind::SyntheticPolynomial;
    if (s == "wave_perturbed") return GeneratorKind::WavePerturbed;
    throw ConfigError("config: unknown generator '" + s + "'");
}

const char* feedback_name(FeedbackSource s) {
    switch (s) {
        case FeedbackSource::Generator: return "generator";
        case FeedbackSource::Given: return "given";
        case FeedbackSource::Designed: return "designed";
    }
    return "?";
}

FeedbackSource feedback_from(const std::string& s) {
    if (s == "generator") return FeedbackSource::Generator;
    if (s == "given") return FeedbackSource::Given;
    if (s == "designed") return FeedbackSource::Designed;
    throw ConfigError("config: unknown feedback source '" + s + "'");
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

// ---------------------------------------------------------------- json in

double as_number(const Json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
    return j.get<double>();
}

std::size_t as_count(const Json& j, const std::string& key) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw ConfigError("config: '" + key + "' must be a nonnegative integer");
    return j.get<std::size_t>();
}

bool as_bool(const Json& j, const std::string& key) {
    if (!j.is_boolean()) throw ConfigError("config: '" + key + "' must be a boolean");
    return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& key) {
    if (!j.is_string()) throw ConfigError("config: '" + key + "' must be a string");
    return j.get<std::string>();
}

Complex as_complex(const Json& j, const std::string& key) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError("config: '" + key + "' must be a number or [re, im]");
}

std::vector<Complex> as_complex_list(const Json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config: '" + key + "' must be an array");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(as_complex(e, key));
    return out;
}

std::vector<double> as_number_list(const Json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config: '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(as_number(e, key));
    return out;
}

PowerLaw as_power_law(const Json& j, const std::string& key) {
    if (!j.is_object()) throw ConfigError("config: '" + key + "' must be an object");
    PowerLaw law;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "scale") law.scale = as_number(it.value(), key + ".scale");
        else if (it.key() == "exponent") law.exponent = as_number(it.value(), key + ".exponent");
        else throw ConfigError("config: unknown key '" + key + "." + it.key() + "'");
    }
    return law;
}

std::optional<double> opt_number(const Json& j, const std::string& key) {
    if (j.is_null()) return std::nullopt;
    return as_number(j, key);
}

// ---------------------------------------------------------------- json out

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json complex_list_json(const std::vector<Complex>& v) {
    Json a = Json::array();
    for (const auto& z : v) a.push_back(complex_json(z));
    return a;
}

Json opt_json(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json tails_json(const TailSums& t) {
    Json j;
    j["b_dnorm_sq"] = opt_json(t.b_dnorm_sq);
    j["f_dnorm_sq"] = opt_json(t.f_dnorm_sq);
    j["b_l2_sq"] = opt_json(t.b_l2_sq);
    j["f_l2_sq"] = opt_json(t.f_l2_sq);
    j["b_over_axis_gap"] = opt_json(t.b_over_axis_gap);
    j["f_over_axis_gap"] = opt_json(t.f_over_axis_gap);
    return j;
}

TailSums tails_from(const Json& j) {
    TailSums t;
    if (!j.is_object()) throw ConfigError("config: 'explicit_tails' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const auto v = opt_number(it.value(), "explicit_tails." + k);
        if (k == "b_dnorm_sq") t.b_dnorm_sq = v;
        else if (k == "f_dnorm_sq") t.f_dnorm_sq = v;
        else if (k == "b_l2_sq") t.b_l2_sq = v;
        else if (k == "f_l2_sq") t.f_l2_sq = v;
        else if (k == "b_over_axis_gap") t.b_over_axis_gap = v;
        else if (k == "f_over_axis_gap") t.f_over_axis_gap = v;
        else throw ConfigError("config: unknown key 'explicit_tails." + k + "'");
    }
    return t;
}

// ---------------------------------------------------------------- csv

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << std::setprecision(17);
    return out;
}

} // namespace

const char* model_name(DecayModel m) {
    return m == DecayModel::PurePower ? "power" : "power_sqrt_log";
}

// -------------------------------------------------------------- canonical

Json SystemConfig::canonical() const {
    Json j;
    j["generator"] = generator_name(generator);
    j["sector"] = {{"alpha", sector.alpha}, {"upsilon", sector.upsilon}, {"omega", sector.omega}};
    j["N"] = N;
    j["upsilon_scale"] = opt_json(upsilon_scale);
    j["b_law"] = {{"scale", b_law.scale}, {"exponent", b_law.exponent}};
    j["f_law"] = {{"scale", f_law.scale}, {"exponent", f_law.exponent}};
    j["N_pairs"] = N_pairs;
    j["b0_coeffs"] = b0_coeffs;
    Json modes = Json::array();
    for (const auto& m : explicit_modes)
        modes.push_back({{"lambda", complex_json(m.lambda)},
                         {"b", complex_json(m.b_coeff)},
                         {"f", complex_json(m.f_coeff)}});
    j["explicit_modes"] = modes;
    j["explicit_tails"] = tails_json(explicit_tails);
    j["beta"] = beta;
    j["gamma"] = gamma;
    j["feedback_source"] = feedback_name(feedback_source);
    j["given_f"] = complex_list_json(given_f);
    j["targets"] = complex_list_json(targets);
    j["f2"] = f2 ? Json{{"scale", f2->scale}, {"support", f2->support}, {"exponent", f2->exponent}}
                 : Json(nullptr);
    j["tau"] = opt_json(tau);
    j["tau_grid"] = tau_grid;
    j["eps_floor"] = opt_json(eps_floor);
    j["t_end"] = t_end;
    j["substeps"] = substeps;
    j["x0"] = {{"law", x0.law},
               {"q", x0.q},
               {"s", x0.s},
               {"normalize", x0.normalize},
               {"coeffs", complex_list_json(x0.coeffs)}};
    j["fit_window"] = fit_window ? Json::array({fit_window->first, fit_window->second})
                                 : Json(nullptr);
    j["run_equivalence"] = run_equivalence;
    j["axis_w_min"] = axis_w_min;
    j["axis_w_max"] = axis_w_max;
    j["axis_points"] = axis_points;
    j["probes"] = complex_list_json(probes);
    j["circle_nodes"] = circle_nodes;
    j["radii_levels"] = radii_levels;
    j["scan_delta"] = opt_json(scan_delta);
    j["scan_nodes"] = scan_nodes;
    j["exterior_count"] = exterior_count;
    j["out_dir"] = out_dir;
    j["write_csv"] = write_csv;
    j["seed"] = seed;
    return j;
}

std::string SystemConfig::canonical_text() const { return canonical().dump(2) + "\n"; }

SystemConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    SystemConfig cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const Json& v = it.value();
        if (v.is_null()) continue; // null means "use the default"
        if (k == "generator")
            cfg.generator = generator_from(as_string(v, k));
        else if (k == "sector") {
            if (!v.is_object()) throw ConfigError("config: 'sector' must be an object");
            for (auto s = v.begin(); s != v.end(); ++s) {
                if (s.key() == "alpha") cfg.sector.alpha = as_number(s.value(), "sector.alpha");
                else if (s.key() == "upsilon")
                    cfg.sector.upsilon = as_number(s.value(), "sector.upsilon");
                else if (s.key() == "omega") cfg.sector.omega = as_number(s.value(), "sector.omega");
                else throw ConfigError("config: unknown key 'sector." + s.key() + "'");
            }
        } else if (k == "N")
            cfg.N = as_count(v, k);
        else if (k == "upsilon_scale")
            cfg.upsilon_scale = as_number(v, k);
        else if (k == "b_law")
            cfg.b_law = as_power_law(v, k);
        else if (k == "f_law")
            cfg.f_law = as_power_law(v, k);
        else if (k == "N_pairs")
            cfg.N_pairs = as_count(v, k);
        else if (k == "b0_coeffs")
            cfg.b0_coeffs = as_number_list(v, k);
        else if (k == "explicit_modes") {
            if (!v.is_array()) throw ConfigError("config: 'explicit_modes' must be an array");
            for (const auto& e : v) {
                if (!e.is_object()) throw ConfigError("config: each explicit mode is an object");
                ModeTriple m;
                for (auto f = e.begin(); f != e.end(); ++f) {
                    if (f.key() == "lambda") m.lambda = as_complex(f.value(), "modes.lambda");
                    else if (f.key() == "b") m.b_coeff = as_complex(f.value(), "modes.b");
                    else if (f.key() == "f") m.f_coeff = as_complex(f.value(), "modes.f");
                    else throw ConfigError("config: unknown key 'explicit_modes." + f.key() + "'");
                }
                cfg.explicit_modes.push_back(m);
            }
        } else if (k == "explicit_tails")
            cfg.explicit_tails = tails_from(v);
        else if (k == "beta")
            cfg.beta = as_number(v, k);
        else if (k == "gamma")
            cfg.gamma = as_number(v, k);
        else if (k == "feedback_source")
            cfg.feedback_source = feedback_from(as_string(v, k));
        else if (k == "given_f")
            cfg.given_f = as_complex_list(v, k);
        else if (k == "targets")
            cfg.targets = as_complex_list(v, k);
        else if (k == "f2") {
            if (!v.is_object()) throw ConfigError("config: 'f2' must be an object or null");
            F2Config f2;
            for (auto s = v.begin(); s != v.end(); ++s) {
                if (s.key() == "scale") f2.scale = as_number(s.value(), "f2.scale");
                else if (s.key() == "support") f2.support = as_count(s.value(), "f2.support");
                else if (s.key() == "exponent") f2.exponent = as_number(s.value(), "f2.exponent");
                else throw ConfigError("config: unknown key 'f2." + s.key() + "'");
            }
            cfg.f2 = f2;
        } else if (k == "tau")
            cfg.tau = as_number(v, k);
        else if (k == "tau_grid")
            cfg.tau_grid = as_number_list(v, k);
        else if (k == "eps_floor")
            cfg.eps_floor = as_number(v, k);
        else if (k == "t_end")
            cfg.t_end = as_number(v, k);
        else if (k == "substeps")
            cfg.substeps = as_count(v, k);
        else if (k == "x0") {
            if (!v.is_object()) throw ConfigError("config: 'x0' must be an object");
            for (auto s = v.begin(); s != v.end(); ++s) {
                if (s.key() == "law") cfg.x0.law = as_string(s.value(), "x0.law");
                else if (s.key() == "q") cfg.x0.q = as_number(s.value(), "x0.q");
                else if (s.key() == "s") cfg.x0.s = as_number(s.value(), "x0.s");
                else if (s.key() == "normalize")
                    cfg.x0.normalize = as_bool(s.value(), "x0.normalize");
                else if (s.key() == "coeffs")
                    cfg.x0.coeffs = as_complex_list(s.value(), "x0.coeffs");
                else throw ConfigError("config: unknown key 'x0." + s.key() + "'");
            }
            if (cfg.x0.law != "power" && cfg.x0.law != "power_log" && cfg.x0.law != "explicit")
                throw ConfigError("config: unknown x0 law '" + cfg.x0.law + "'");
        } else if (k == "fit_window") {
            const auto w = as_number_list(v, k);
            if (w.size() != 2) throw ConfigError("config: 'fit_window' must be [t_lo, t_hi]");
            cfg.fit_window = std::make_pair(w[0], w[1]);
        } else if (k == "run_equivalence")
            cfg.run_equivalence = as_bool(v, k);
        else if (k == "axis_w_min")
            cfg.axis_w_min = as_number(v, k);
        else if (k == "axis_w_max")
            cfg.axis_w_max = as_number(v, k);
        else if (k == "axis_points")
            cfg.axis_points = as_count(v, k);
        else if (k == "probes")
            cfg.probes = as_complex_list(v, k);
        else if (k == "circle_nodes")
            cfg.circle_nodes = as_count(v, k);
        else if (k == "radii_levels")
            cfg.radii_levels = as_count(v, k);
        else if (k == "scan_delta")
            cfg.scan_delta = as_number(v, k);
        else if (k == "scan_nodes")
            cfg.scan_nodes = as_count(v, k);
        else if (k == "exterior_count")
            cfg.exterior_count = as_count(v, k);
        else if (k == "out_dir")
            cfg.out_dir = as_string(v, k);
        else if (k == "write_csv")
            cfg.write_csv = as_bool(v, k);
        else if (k == "seed")
            cfg.seed = static_cast<std::uint64_t>(as_count(v, k));
        else
            throw ConfigError("config: unknown key '" + k + "'");
    }
    return cfg;
}

SystemConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

std::string config_hash(const SystemConfig& cfg) {
    const std::string text = cfg.canonical_text();
    std::uint64_t h = 1469598103934665603ull; // FNV offset basis
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull; // FNV prime
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

// ------------------------------------------------------------------ build

BuiltSystem build_system(const SystemConfig& cfg) {
    BuiltSystem built;
    switch (cfg.generator) {
        case GeneratorKind::Explicit: {
            built.sys.modes = cfg.explicit_modes;
            built.sys.sector = cfg.sector;
            built.sys.beta = cfg.beta;
            built.sys.gamma = cfg.gamma;
            built.sys.tails = cfg.explicit_tails;
            built.sys.validate();
            break;
        }
        case GeneratorKind::SyntheticPolynomial: {
            built.sys = generate_synthetic(cfg.sector.alpha,
                                           cfg.upsilon_scale.value_or(cfg.sector.upsilon), cfg.N,
                                           cfg.b_law, cfg.f_law, cfg.beta, cfg.gamma,
                                           cfg.sector.omega);
            built.sys.sector = cfg.sector; // audits use the declared sector
            break;
        }
        case GeneratorKind::WavePerturbed: {
            built.sys = generate_wave(cfg.N_pairs, cfg.sector.upsilon, cfg.sector.alpha,
                                      cfg.b0_coeffs, cfg.beta, cfg.gamma, cfg.sector.omega);
            break;
        }
    }

    switch (cfg.feedback_source) {
        case FeedbackSource::Generator:
            break;
        case FeedbackSource::Given: {
            if (cfg.given_f.size() != built.sys.size())
                throw SizeMismatch("build_system: given_f length does not match the mode count");
            for (std::size_t i = 0; i < built.sys.size(); ++i)
                built.sys.modes[i].f_coeff = cfg.given_f[i];
            break;
        }
        case FeedbackSource::Designed: {
            built.design = design_feedback(built.sys, cfg.targets);
            built.sys = with_designed_feedback(built.sys, built.design);
            break;
        }
    }

    // Additive stable-feedback profile.  Wave systems index it per conjugate
    // pair (both slots of pair n get the same real value); everything else
    // per mode.  support = 0 covers the whole truncation.
    if (cfg.f2) {
        const bool paired = cfg.generator == GeneratorKind::WavePerturbed;
        const std::size_t groups = paired ? built.sys.size() / 2 : built.sys.size();
        const std::size_t lim =
            cfg.f2->support == 0 ? groups : std::min(cfg.f2->support, groups);
        for (std::size_t g = 0; g < lim; ++g) {
            const double val =
                cfg.f2->scale * std::pow(static_cast<double>(g + 1), -cfg.f2->exponent);
            if (paired) {
                built.sys.modes[2 * g].f_coeff += val;
                built.sys.modes[2 * g + 1].f_coeff += val;
            } else {
                built.sys.modes[g].f_coeff += val;
            }
        }
    }

    // Initial state.
    const std::size_t n = built.sys.size();
    built.x0.assign(n, Complex(0.0, 0.0));
    if (cfg.x0.law == "explicit") {
        if (cfg.x0.coeffs.size() != n)
            throw SizeMismatch("build_system: x0 coefficient length does not match the mode count");
        built.x0 = cfg.x0.coeffs;
    } else {
        const bool with_log = cfg.x0.law == "power_log";
        const bool paired = cfg.generator == GeneratorKind::WavePerturbed;
        const std::size_t groups = paired ? n / 2 : n;
        for (std::size_t g = 0; g < groups; ++g) {
            const double m = static_cast<double>(g + 1);
            double val = std::pow(m, -cfg.x0.q);
            if (with_log) val *= std::pow(std::log(m + 1.0), cfg.x0.s);
            if (paired) {
                built.x0[2 * g] = val;
                built.x0[2 * g + 1] = val;
            } else {
                built.x0[g] = val;
            }
        }
    }
    if (cfg.x0.normalize) {
        const double nrm = state_norm(built.x0);
        if (nrm == 0.0) throw ZeroNorms("build_system: cannot normalize a zero initial state");
        for (auto& c : built.x0) c /= nrm;
    }
    return built;
}

// --------------------------------------------------------------- pipeline

std::vector<double> default_axis_grid(const SystemConfig& cfg) {
    // Modal data need not be conjugate-symmetric, so |1 - G| is probed at
    // negative frequencies too.
    if (!(cfg.axis_w_min > 0.0) || !(cfg.axis_w_max > cfg.axis_w_min))
        throw ConfigError("axis grid: need 0 < axis_w_min < axis_w_max");
    if (cfg.axis_points < 2) throw ConfigError("axis grid: need at least 2 points");
    std::vector<double> grid;
    grid.reserve(2 * cfg.axis_points + 1);
    grid.push_back(0.0);
    const double lo = std::log(cfg.axis_w_min);
    const double hi = std::log(cfg.axis_w_max);
    for (std::size_t i = 0; i < cfg.axis_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(cfg.axis_points - 1);
        const double w = std::exp(lo + t * (hi - lo));
        grid.push_back(w);
        grid.push_back(-w);
    }
    return grid;
}

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

} // namespace

RunReport run_pipeline(const SystemConfig& cfg) {
    RunReport rep;
    rep.config_hash = config_hash(cfg);
    rep.seed = cfg.seed;

    const BuiltSystem built = stage("build", [&] { return build_system(cfg); });

    stage("audit", [&] {
        rep.audit = audit_assumptions(built.sys);
        rep.split = split_spectrum(built.sys);
        return 0;
    });
    rep.audit_pass = rep.audit.structural_pass();
    if (!rep.audit_pass) return rep; // structurally unsound: nothing downstream is meaningful

    stage("margins", [&] {
        rep.continuous = continuous_margin(built.sys, default_axis_grid(cfg), cfg.probes);
        rep.ran_margins = true;
        rep.floor_used = cfg.eps_floor.value_or(rep.continuous.eps_c / 2.0);
        if (!cfg.tau_grid.empty())
            rep.tau_scan = estimate_tau_star(built.sys, cfg.tau_grid, rep.floor_used);
        else
            rep.tau_scan.floor_used = rep.floor_used;
        return 0;
    });
    rep.tau_star_found = rep.tau_scan.tau_star.has_value();

    if (cfg.tau)
        rep.chosen_tau = *cfg.tau;
    else if (rep.tau_scan.tau_star)
        rep.chosen_tau = *rep.tau_scan.tau_star / 2.0;

    if (rep.chosen_tau) {
        stage("simulate", [&] {
            rep.trajectory =
                simulate_closed_loop(built.sys, *rep.chosen_tau, built.x0, cfg.t_end, cfg.substeps);
            return 0;
        });
        stage("fit", [&] {
            for (DecayModel model : {DecayModel::PurePower, DecayModel::PowerSqrtLog}) {
                rep.fits.push_back(cfg.fit_window
                                       ? fit_decay_window(*rep.trajectory, model,
                                                          cfg.fit_window->first,
                                                          cfg.fit_window->second)
                                       : fit_decay(*rep.trajectory, model));
            }
            return 0;
        });
        if (cfg.run_equivalence && cfg.substeps >= 2) {
            stage("equivalence", [&] {
                rep.equivalence = equivalence_check(built.sys, *rep.chosen_tau, built.x0,
                                                    cfg.t_end, cfg.substeps);
                return 0;
            });
        }
        if (cfg.scan_delta) {
            stage("scan", [&] {
                const SampledOperator op = make_sampled(built.sys, *rep.chosen_tau);
                const ScalingFn scaling = ScalingFn::for_delta(*cfg.scan_delta);
                std::vector<double> radii = default_radius_ladder();
                if (cfg.radii_levels < radii.size()) radii.resize(cfg.radii_levels);
                rep.scan = scaled_scan(op, built.x0, scaling, radii, cfg.scan_nodes, false);
                rep.scan_adjoint = scaled_scan(op, built.x0, scaling, radii, cfg.scan_nodes, true);
                return 0;
            });
        }
    }

    rep.overall_pass = rep.audit_pass && (cfg.tau_grid.empty() || rep.tau_star_found);
    return rep;
}

// ----------------------------------------------------------------- report

Json RunReport::to_json() const {
    Json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;

    Json a;
    a["a1"] = verdict_name(audit.a1);
    a["a1_count_in_bad_region"] = audit.a1_count_in_bad_region;
    a["a1_indices"] = audit.a1_indices;
    a["a2"] = verdict_name(audit.a2);
    a["a2_min_axis_distance"] = audit.a2_min_axis_distance;
    a["a3"] = verdict_name(audit.a3);
    a["a4"] = verdict_name(audit.a4);
    a["a4_branch"] = audit.a4_branch;
    a["a4_beta_norm"] = audit.a4_beta_norm;
    a["a4_gamma_norm"] = audit.a4_gamma_norm;
    j["audit"] = a;

    j["split"] = {{"unstable", split.unstable.size()},
                  {"bad_region", split.bad_region.size()},
                  {"stable", split.stable.size()}};

    if (ran_margins) {
        j["continuous_margin"] = {{"eps_c", continuous.eps_c},
                                  {"argmin", complex_json(continuous.argmin)},
                                  {"tail_available", continuous.tail_available},
                                  {"tail_bound", continuous.tail_bound},
                                  {"grid_points", continuous.grid_points}};
    } else {
        j["continuous_margin"] = nullptr;
    }

    Json rows = Json::array();
    for (const auto& r : tau_scan.rows)
        rows.push_back({{"tau", r.tau}, {"eps_d", r.eps_d}, {"nonresonant", r.nonresonant}});
    j["tau_scan"] = {{"rows", rows},
                     {"tau_star", tau_scan.tau_star ? Json(*tau_scan.tau_star) : Json(nullptr)},
                     {"floor", tau_scan.floor_used}};

    j["chosen_tau"] = chosen_tau ? Json(*chosen_tau) : Json(nullptr);

    if (trajectory) {
        j["trajectory"] = {{"points", trajectory->times.size()},
                           {"t_end", trajectory->times.empty() ? 0.0 : trajectory->times.back()},
                           {"final_norm",
                            trajectory->norms.empty() ? 0.0 : trajectory->norms.back()},
                           {"x0_delta_class", trajectory->x0_delta_class}};
    } else {
        j["trajectory"] = nullptr;
    }

    Json fits_j = Json::array();
    for (const auto& f : fits) {
        fits_j.push_back({{"model", model_name(f.model)},
                          {"exponent", f.exponent},
                          {"amplitude", f.amplitude},
                          {"t_lo", f.t_lo},
                          {"t_hi", f.t_hi},
                          {"rms_residual", f.rms_residual},
                          {"points", f.points},
                          {"zero_norms_excluded", f.zero_norms_excluded},
                          {"non_decaying", f.non_decaying}});
    }
    j["fits"] = fits_j;

    if (equivalence) {
        j["equivalence"] = {{"exponent_sampled", equivalence->exponent_sampled},
                            {"exponent_full", equivalence->exponent_full},
                            {"diff", equivalence->diff},
                            {"agree", equivalence->agree}};
    } else {
        j["equivalence"] = nullptr;
    }

    auto scan_json = [](const std::optional<ScanTable>& t) -> Json {
        if (!t) return nullptr;
        Json rows_j = Json::array();
        for (const auto& r : t->rows)
            rows_j.push_back({{"r", r.r},
                              {"raw_integral", r.raw_integral},
                              {"scaled_value", r.scaled_value},
                              {"nodes", r.nodes},
                              {"adjoint", r.adjoint}});
        return Json{{"rows", rows_j},
                    {"loglog_slope", t->loglog_slope},
                    {"limit_zero", t->limit_zero},
                    {"tol", t->tol}};
    };
    j["scan"] = scan_json(scan);
    j["scan_adjoint"] = scan_json(scan_adjoint);

    j["certificates"] = {{"audit_pass", audit_pass},
                         {"tau_star_found", tau_star_found},
                         {"overall_pass", overall_pass}};
    return j;
}

// -------------------------------------------------------------------- csv

void write_margins_csv(const std::string& path, const TauStarScan& scan) {
    auto out = open_out(path);
    out << "tau,eps_d,nonresonant\n";
    for (const auto& r : scan.rows)
        out << r.tau << ',' << r.eps_d << ',' << (r.nonresonant ? 1 : 0) << '\n';
}

void write_scan_csv(const std::string& path, const ScanTable& table) {
    auto out = open_out(path);
    out << "r,raw_integral,scaled_value,nodes,adjoint\n";
    for (const auto& r : table.rows)
        out << r.r << ',' << r.raw_integral << ',' << r.scaled_value << ',' << r.nodes << ','
            << (r.adjoint ? 1 : 0) << '\n';
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,norm\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        out << traj.times[i] << ',' << traj.norms[i] << '\n';
}

void write_fits_csv(const std::string& path, const std::vector<DecayFit>& fits) {
    auto out = open_out(path);
    out << "model,exponent,amplitude,t_lo,t_hi,rms_residual,points,zero_norms_excluded,"
           "non_decaying\n";
    for (const auto& f : fits)
        out << model_name(f.model) << ',' << f.exponent << ',' << f.amplitude << ',' << f.t_lo
            << ',' << f.t_hi << ',' << f.rms_residual << ',' << f.points << ','
            << f.zero_norms_excluded << ',' << (f.non_decaying ? 1 : 0) << '\n';
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,norm", 0) != 0)
        throw ConfigError("trajectory csv: expected header 't,norm' in '" + path + "'");
    Trajectory traj;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        double t = 0.0, nrm = 0.0;
        char comma = 0;
        if (!(row >> t >> comma >> nrm) || comma != ',')
            throw ConfigError("trajectory csv: malformed row " + std::to_string(lineno) + " in '" +
                              path + "'");
        traj.times.push_back(t);
        traj.norms.push_back(nrm);
    }
    return traj;
}

} // namespace rieszlab
