#include "chern/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "chern/invariants.hpp"
#include "chern/phasediag.hpp"
#include "chern/quadring.hpp"
#include "chern/workers.hpp"

namespace chern::cli {

using nlohmann::json;

namespace {

void dump_into(const json& value, int indent, int depth, std::string& out) {
    const auto newline = [&](int level) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (value.type()) {
        case json::value_t::number_float:
            out += format_number(value.get<double>());
            return;
        case json::value_t::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_into(item, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, item] : value.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(key).dump();
                out += indent < 0 ? ":" : ": ";
                dump_into(item, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        default:
            out += value.dump();
    }
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }

json error_json(const Error& e) {
    return {{"error",
             {{"class", e.error_class() == ErrorClass::config ? "config" : "numeric"},
              {"kind", e.kind()},
              {"message", e.what()}}}};
}

std::pair<int, int> parse_grid(const std::string& text) {
    int nx = 0;
    int ny = 0;
    char sep = 0;
    std::istringstream in(text);
    in >> nx;
    if (in && in.peek() == 'x') {
        in >> sep >> ny;
    } else {
        ny = nx;
    }
    if (!in.eof() && !(in >> std::ws).eof()) throw ConfigError("InvalidArgument", "grid must look like 60x60, got " + text);
    if (nx < 2 || ny < 2) throw ConfigError("InvalidArgument", "grid must be at least 2x2, got " + text);
    return {nx, ny};
}

phasediag::Axis parse_axis(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
    if (parts.size() != 4) throw ConfigError("InvalidArgument", "axis must look like name:lo:hi:n, got " + text);
    try {
        std::size_t used = 0;
        phasediag::Axis axis{parts[0], std::stod(parts[1], &used), 0.0, 0};
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        axis.hi = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
        axis.points = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument(parts[3]);
        return axis;
    } catch (const std::logic_error&) {
        throw ConfigError("InvalidArgument", "axis must look like name:lo:hi:n, got " + text);
    }
}

invariants::Method parse_method(const std::string& text) {
    if (text == "berry") return invariants::Method::berry_lattice;
    if (text == "integral") return invariants::Method::degree_integral;
    if (text == "ray") return invariants::Method::degree_ray;
    throw ConfigError("InvalidArgument", "unknown method " + text);
}

json params_json(const models::BlochModel& model, const models::Params& params) {
    json out = json::object();
    for (std::size_t i = 0; i < model.schema.size(); ++i) {
        if (model.schema[i].integer) {
            out[model.schema[i].name] = static_cast<long long>(std::lround(params[i]));
        } else {
            out[model.schema[i].name] = params[i];
        }
    }
    return out;
}

json result_json(const invariants::ChernResult& r) {
    json diagnostics = {{"band", r.band}};
    switch (r.method) {
        case invariants::Method::berry_lattice:
            diagnostics["grid"] = json::array({r.grid.nx, r.grid.ny});
            diagnostics["min_gap"] = r.min_gap;
            break;
        case invariants::Method::degree_integral: {
            diagnostics["grid"] = json::array({r.grid.nx, r.grid.ny});
            diagnostics["min_field_norm"] = r.min_field_norm;
            diagnostics["analytic_derivatives"] = r.analytic_derivatives;
            json history = json::array();
            for (const auto& h : r.history) history.push_back({{"grid", json::array({h.grid.nx, h.grid.ny})}, {"raw", h.raw}});
            diagnostics["history"] = history;
            break;
        }
        case invariants::Method::degree_ray: {
            diagnostics["ray"] = json::array({r.ray.x, r.ray.y, r.ray.z});
            diagnostics["ray_attempts"] = r.ray_attempts;
            diagnostics["half_sum"] = r.half_sum;
            json points = json::array();
            for (const auto& c : r.contributions) {
                points.push_back({{"k", vec(c.k)}, {"sign", c.jacobian_sign}, {"height", c.height}});
            }
            diagnostics["preimages"] = points;
            break;
        }
    }
    return {{"value", r.value},
            {"raw", r.raw},
            {"residual", r.residual},
            {"method", invariants::to_string(r.method)},
            {"diagnostics", diagnostics}};
}

json cross_json(const invariants::CrossValidation& report, bool timings) {
    json runs = json::array();
    for (const auto& run : report.runs) {
        json entry = run.result ? result_json(*run.result) : json{{"method", invariants::to_string(run.method)}};
        if (!run.result) entry["inapplicable"] = run.inapplicable;
        if (timings) entry["seconds"] = run.seconds;
        runs.push_back(entry);
    }
    return {{"method", "all"}, {"value", report.value}, {"unanimous", report.unanimous}, {"runs", runs}};
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("FileError", "cannot write " + path);
    file << text;
}

void check_format(const std::string& format) {
    if (format != "json" && format != "csv") throw ConfigError("InvalidArgument", "format must be json or csv");
}

json models_json() {
    json out = json::array();
    for (const auto& name : models::model_names()) {
        const auto model = models::builtin_model(name);
        json schema = json::array();
        for (const auto& p : model.schema) {
            schema.push_back({{"name", p.name},
                              {"default", p.integer ? json(static_cast<long long>(p.default_value)) : json(p.default_value)},
                              {"lo", p.lo},
                              {"hi", p.hi},
                              {"integer", p.integer}});
        }
        const char* basis = model.basis == models::Basis::pauli       ? "pauli"
                            : model.basis == models::Basis::gell_mann ? "gell_mann"
                                                                      : "matrix";
        out.push_back({{"name", name},
                       {"lattice", model.lattice},
                       {"bands", model.bands},
                       {"basis", basis},
                       {"params", schema}});
    }
    return out;
}

// Sampling box for the validate subcommand: the default widened by
// max(2, 2 |default|), clipped to the schema range.
models::Params sample_params(const models::BlochModel& model, const models::Params& base, std::mt19937_64& rng) {
    models::Params out = base;
    for (std::size_t i = 0; i < model.schema.size(); ++i) {
        const auto& spec = model.schema[i];
        if (spec.integer) continue;
        const double width = std::max(2.0, 2.0 * std::abs(base[i]));
        const double lo = std::max(spec.lo, base[i] - width);
        const double hi = std::min(spec.hi, base[i] + width);
        out[i] = lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    return out;
}

int emit_failure(std::ostream& err, const json& payload, int code) {
    err << dump(payload, -1) << '\n';
    return code;
}

}  // namespace

std::string format_number(double value) {
    if (!std::isfinite(value)) return "null";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    std::string text = buffer;
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    return text;
}

std::string dump(const json& value, int indent) {
    std::string out;
    dump_into(value, indent, 0, out);
    return out;
}

ModelConfig load_model_config(const std::string& path_or_json) {
    std::string text = path_or_json;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
        std::ifstream file(path_or_json);
        if (!file) throw ConfigError("FileError", "cannot read model config " + path_or_json);
        std::stringstream buffer;
        buffer << file.rdbuf();
        text = buffer.str();
    }
    json config;
    try {
        config = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("InvalidConfig", std::string("model config is not valid JSON: ") + e.what());
    }
    if (!config.is_object()) throw ConfigError("InvalidConfig", "model config must be a JSON object");
    for (const auto& [key, _] : config.items()) {
        if (key != "model" && key != "params" && key != "N" && key != "variant") {
            throw ConfigError("InvalidConfig", "unknown model config key " + key);
        }
    }
    if (!config.contains("model") || !config["model"].is_string()) {
        throw ConfigError("InvalidConfig", "model config needs a string \"model\"");
    }
    models::BlochModel model = models::builtin_model(config["model"].get<std::string>());

    int n = 1;
    if (config.contains("N")) {
        const auto& value = config["N"];
        if (!value.is_number_integer()) throw ConfigError("InvalidConfig", "\"N\" must be an integer");
        n = value.get<int>();
    }
    auto variant = models::ScaleVariant::all;
    if (config.contains("variant")) {
        if (!config["variant"].is_string()) throw ConfigError("InvalidConfig", "\"variant\" must be a string");
        variant = models::parse_scale_variant(config["variant"].get<std::string>());
    }
    if (n != 1 || config.contains("variant")) model = models::scale_model(model, n, variant);

    models::ParamMap overrides;
    if (config.contains("params")) {
        const auto& params = config["params"];
        if (!params.is_object()) throw ConfigError("InvalidConfig", "\"params\" must be an object");
        for (const auto& [key, value] : params.items()) {
            if (!value.is_number()) throw ConfigError("InvalidConfig", "parameter " + key + " must be a number");
            overrides[key] = value.get<double>();
        }
    }
    return {model, model.resolve(overrides)};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chern numbers, phase diagrams and wall-crossing families of 2D Bloch Hamiltonians", "chern"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", std::string(version));
    bool list_models = false;
    int workers = 0;
    app.add_flag("--list-models", list_models, "Print the model catalog and exit");
    app.add_option("--workers", workers, "Worker threads (0: CHERN_WORKERS or hardware concurrency)")
        ->check(CLI::NonNegativeNumber);

    std::string output;
    std::string model_config;

    auto* ring = app.add_subcommand("ring", "Quadratic integer rings and commensurate lattice shells");
    std::int64_t ring_d = 1;
    std::string ring_op = "classify";
    std::int64_t ring_n = 0;
    double ring_limit = 12.0;
    bool ring_rotated = false;
    ring->add_option("--d", ring_d, "Square-free d > 0 of Z[sqrt(-d)] or its half-basis ring")->required();
    ring->add_option("--op", ring_op, "classify | shell | isolated | distances")
        ->check(CLI::IsMember({"classify", "shell", "isolated", "distances"}));
    ring->add_option("--n", ring_n, "Prime for classify, norm for shell and isolated");
    ring->add_option("--limit", ring_limit, "Largest distance for distances");
    ring->add_flag("--rotated", ring_rotated, "Include rotated shells in distances");
    std::string ring_format = "json";
    ring->add_option("--format", ring_format, "json | csv");

    auto* models_cmd = app.add_subcommand("models", "Model catalog");
    std::string models_action = "list";
    models_cmd->add_option("action", models_action, "list")->check(CLI::IsMember({"list"}));

    auto* chern_cmd = app.add_subcommand("chern", "First Chern number of a band");
    std::string method_text = "berry";
    int band = 0;
    std::string integral_grid_text = "200x200";
    bool timings = false;
    std::string grid_text;
    chern_cmd->add_option("--model-config", model_config, "Model config file or inline JSON")->required();
    chern_cmd->add_option("--method", method_text, "berry | integral | ray | all")
        ->check(CLI::IsMember({"berry", "integral", "ray", "all"}));
    chern_cmd->add_option("--band", band, "Band index, lowest first");
    chern_cmd->add_option("--grid", grid_text, "Zone grid NxN");
    chern_cmd->add_option("--integral-grid", integral_grid_text, "Integral grid for --method all");
    chern_cmd->add_flag("--timings", timings, "Report engine run times");

    auto* scan_cmd = app.add_subcommand("scan", "Phase diagram over one or two parameters");
    std::vector<std::string> axis_texts;
    double threshold = phasediag::default_degeneracy_threshold;
    std::string gap_grid_text = "48x48";
    std::string summary_path;
    std::string scan_method = "berry";
    std::string scan_grid_text = "40x40";
    std::string scan_format = "csv";
    scan_cmd->add_option("--model-config", model_config, "Model config file or inline JSON")->required();
    scan_cmd->add_option("--axis", axis_texts, "name:lo:hi:n, once or twice")->required()->expected(1, 2);
    scan_cmd->add_option("--threshold", threshold, "Degeneracy threshold on the refined minimum gap");
    scan_cmd->add_option("--method", scan_method, "berry | integral | ray")
        ->check(CLI::IsMember({"berry", "integral", "ray"}));
    scan_cmd->add_option("--band", band, "Band index, lowest first");
    scan_cmd->add_option("--grid", scan_grid_text, "Chern grid NxN");
    scan_cmd->add_option("--gap-grid", gap_grid_text, "Gap search grid NxN");
    scan_cmd->add_option("--format", scan_format, "csv | json");
    scan_cmd->add_option("--output", output, "Output file (default stdout)");
    scan_cmd->add_option("--summary", summary_path, "Write the boundary summary JSON here (csv format)");

    auto* rose_cmd = app.add_subcommand("rose", "Rose curve (1 - t) z^d + t z^d' on the unit circle");
    int d = 0;
    int dprime = 0;
    double t = 0.5;
    int samples = 0;
    std::string rose_format = "csv";
    rose_cmd->add_option("--d", d)->required();
    rose_cmd->add_option("--dprime", dprime)->required();
    rose_cmd->add_option("--t", t);
    rose_cmd->add_option("--samples", samples, "Minimum sample count");
    rose_cmd->add_option("--format", rose_format, "csv | json");
    rose_cmd->add_option("--output", output, "Output file (default stdout)");

    auto* wall_cmd = app.add_subcommand("wall", "Wall crossing between suspended z^d and z^d'");
    int t_samples = 101;
    int phi_samples = 2048;
    std::string wall_format = "json";
    wall_cmd->add_option("--d", d)->required();
    wall_cmd->add_option("--dprime", dprime)->required();
    wall_cmd->add_option("--t-samples", t_samples);
    wall_cmd->add_option("--phi-samples", phi_samples);
    wall_cmd->add_option("--format", wall_format, "json | csv");
    wall_cmd->add_option("--output", output, "Output file (default stdout)");

    auto* fan_cmd = app.add_subcommand("fan", "Realize a planar fan of Chern labels and verify it");
    std::vector<int> labels;
    double radius = 1.0;
    double tolerance = 1e-9;
    fan_cmd->add_option("--labels", labels, "Chamber labels, counterclockwise from the positive x axis")
        ->required()
        ->delimiter(',');
    fan_cmd->add_option("--radius", radius, "Probe radius");
    fan_cmd->add_option("--tolerance", tolerance, "Degeneracy tolerance on |F|");

    auto* validate_cmd = app.add_subcommand("validate", "Cross-validate the engines at random parameter points");
    int points = 20;
    std::uint64_t seed = 1;
    std::string validate_grid_text = "60x60";
    validate_cmd->add_option("--model-config", model_config, "Model config file or inline JSON")->required();
    validate_cmd->add_option("--points", points)->check(CLI::PositiveNumber);
    validate_cmd->add_option("--seed", seed);
    validate_cmd->add_option("--grid", validate_grid_text, "Berry grid NxN");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        return emit_failure(err, {{"error", {{"class", "config"}, {"kind", "UsageError"}, {"message", e.what()}}}},
                            config_error);
    }

    try {
        set_worker_count(workers);
        if (list_models || models_cmd->parsed()) {
            out << dump(models_json()) << '\n';
            return ok;
        }

        if (ring->parsed()) {
            check_format(ring_format);
            const auto r = quadring::make_ring(ring_d);
            json result = {{"d", r.d}, {"op", ring_op}};
            std::string csv;
            if (ring_op == "classify") {
                if (ring_n < 2) throw ConfigError("InvalidArgument", "classify needs --n, a prime");
                const auto behavior = quadring::classify_prime(r, static_cast<std::uint64_t>(ring_n));
                result["p"] = ring_n;
                result["behavior"] = quadring::to_string(behavior);
                csv = "d,p,behavior\n" + std::to_string(r.d) + "," + std::to_string(ring_n) + "," +
                      quadring::to_string(behavior) + "\n";
            } else if (ring_op == "shell" || ring_op == "isolated") {
                if (ring_n < 0) throw ConfigError("InvalidArgument", ring_op + " needs --n >= 0");
                const auto shell = quadring::shell_enumerate(r, ring_n);
                result["n"] = ring_n;
                result["represented"] = shell.represented;
                result["isolated"] = shell.isolated;
                if (ring_op == "shell") {
                    json pts = json::array();
                    csv = "a,b\n";
                    for (const auto& p : shell.points) {
                        pts.push_back(json::array({p.a, p.b}));
                        csv += std::to_string(p.a) + "," + std::to_string(p.b) + "\n";
                    }
                    result["points"] = pts;
                } else {
                    result["sufficient_condition"] = quadring::isolated_norm_sufficient(r, ring_n);
                    csv = "n,represented,isolated\n" + std::to_string(ring_n) + "," +
                          (shell.represented ? "true" : "false") + "," + (shell.isolated ? "true" : "false") + "\n";
                }
            } else {
                quadring::PlanarLattice lattice{};
                if (r.d == 1) {
                    lattice = quadring::PlanarLattice::square;
                } else if (r.d == 3) {
                    lattice = quadring::PlanarLattice::triangular;
                } else {
                    throw ConfigError("InvalidArgument", "distances are defined for the lattices of d = 1 and d = 3");
                }
                result["limit"] = ring_limit;
                json distances = json::array();
                json shells = json::array();
                csv = ring_rotated ? "norm,distance,aligned\n" : "distance\n";
                for (const auto& shell : quadring::commensurate_shells(lattice, ring_limit, ring_rotated)) {
                    if (shell.aligned) {
                        const auto n = static_cast<long long>(std::llround(shell.distance));
                        distances.push_back(n);
                        if (!ring_rotated) csv += std::to_string(n) + "\n";
                    }
                    if (ring_rotated) {
                        shells.push_back({{"norm", shell.norm}, {"distance", shell.distance}, {"aligned", shell.aligned}});
                        csv += std::to_string(shell.norm) + "," + format_number(shell.distance) + "," +
                               (shell.aligned ? "true" : "false") + "\n";
                    }
                }
                result["distances"] = distances;
                if (ring_rotated) result["shells"] = shells;
            }
            out << (ring_format == "csv" ? csv : dump(result) + "\n");
            return ok;
        }

        if (chern_cmd->parsed()) {
            const auto config = load_model_config(model_config);
            if (method_text == "all") {
                invariants::CrossValidateOptions options;
                if (!grid_text.empty()) {
                    const auto [nx, ny] = parse_grid(grid_text);
                    options.berry_grid = {nx, ny};
                }
                const auto [ix, iy] = parse_grid(integral_grid_text);
                options.integral_grid = {ix, iy};
                try {
                    out << dump(cross_json(invariants::cross_validate(config.model, config.params, options), timings))
                        << '\n';
                } catch (const invariants::EngineDisagreement& e) {
                    json payload = error_json(e);
                    payload["error"]["report"] = cross_json(e.report, timings);
                    return emit_failure(err, payload, numeric_error);
                }
                return ok;
            }
            const auto method = parse_method(method_text);
            invariants::ChernResult result;
            switch (method) {
                case invariants::Method::berry_lattice: {
                    const auto [nx, ny] = parse_grid(grid_text.empty() ? "60x60" : grid_text);
                    result = invariants::chern_berry_lattice(config.model, config.params, band, {nx, ny});
                    break;
                }
                case invariants::Method::degree_integral: {
                    if (band != 0) throw ConfigError("InvalidArgument", "the degree engines compute band 0");
                    const auto [nx, ny] = parse_grid(grid_text.empty() ? "200x200" : grid_text);
                    result = invariants::degree_integral(config.model, config.params, {nx, ny});
                    break;
                }
                case invariants::Method::degree_ray:
                    if (band != 0) throw ConfigError("InvalidArgument", "the degree engines compute band 0");
                    result = invariants::degree_ray(config.model, config.params);
                    break;
            }
            json payload = result_json(result);
            payload["model"] = config.model.name;
            payload["params"] = params_json(config.model, config.params);
            out << dump(payload) << '\n';
            return ok;
        }

        if (scan_cmd->parsed()) {
            check_format(scan_format);
            const auto config = load_model_config(model_config);
            std::vector<phasediag::Axis> axes;
            for (const auto& text : axis_texts) axes.push_back(parse_axis(text));
            phasediag::ScanOptions options;
            options.threshold = threshold;
            options.method = parse_method(scan_method);
            options.band = band;
            const auto [nx, ny] = parse_grid(scan_grid_text);
            options.chern_grid = {nx, ny};
            const auto [gx, gy] = parse_grid(gap_grid_text);
            options.gap.grid = {gx, gy};
            const auto diagram = phasediag::scan(config.model, config.params, axes, options);

            json boundaries = json::array();
            for (const auto& b : diagram.boundaries) {
                boundaries.push_back({{"from", b.from},
                                      {"to", b.to},
                                      {"axis", axes[static_cast<std::size_t>(b.axis)].name},
                                      {"location", b.location},
                                      {"gap", b.gap}});
            }
            json criticals = json::array();
            for (const auto& c : diagram.criticals) criticals.push_back({{"location", c.location}, {"gap", c.gap}});
            json axes_json = json::array();
            for (const auto& a : axes) axes_json.push_back({{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"points", a.points}});
            json summary = {{"model", diagram.model},
                            {"params", params_json(config.model, config.params)},
                            {"axes", axes_json},
                            {"threshold", threshold},
                            {"boundaries", boundaries},
                            {"criticals", criticals},
                            {"errors", diagram.errors}};

            const auto label = [](const phasediag::Cell& c) -> std::string {
                if (c.chern) return std::to_string(*c.chern);
                return c.degenerate ? "DEG" : "ERR";
            };
            if (scan_format == "json") {
                json cells = json::array();
                for (const auto& c : diagram.cells) {
                    json cell = {{"coords", c.coords},
                                 {"chern", c.chern ? json(*c.chern) : json(label(c))},
                                 {"min_gap", c.min_gap},
                                 {"min_gap_at", vec(c.min_gap_at)}};
                    if (!c.error.empty()) cell["error"] = c.error;
                    cells.push_back(cell);
                }
                summary["cells"] = cells;
                write_text(output, dump(summary) + "\n", out);
                return ok;
            }
            std::string csv;
            for (const auto& a : axes) csv += a.name + ",";
            csv += "chern,min_gap,min_gap_kx,min_gap_ky\n";
            for (const auto& c : diagram.cells) {
                for (const double x : c.coords) csv += format_number(x) + ",";
                csv += label(c) + "," + format_number(c.min_gap) + "," + format_number(c.min_gap_at.x) + "," +
                       format_number(c.min_gap_at.y) + "\n";
            }
            write_text(output, csv, out);
            if (!summary_path.empty()) write_text(summary_path, dump(summary) + "\n", out);
            return ok;
        }

        if (rose_cmd->parsed()) {
            check_format(rose_format);
            const auto curve = phasediag::rose_curve(d, dprime, t, samples);
            if (rose_format == "csv") {
                std::string csv = "x,y\n";
                for (const auto& p : curve.samples) csv += format_number(p.x) + "," + format_number(p.y) + "\n";
                write_text(output, csv, out);
                return ok;
            }
            json result = {{"d", d}, {"dprime", dprime}, {"t", t}, {"samples", curve.samples.size()}};
            result["k_rose"] = curve.k_rose ? json(*curve.k_rose) : json(nullptr);
            result["polar_period"] = curve.polar_period;
            if (std::abs(t - 0.5) > 1e-15) {
                result["winding"] = invariants::winding_number({curve.samples, true});
            } else if (curve.k_rose) {
                result["polar_deviation"] = phasediag::polar_deviation(curve);
            }
            json xy = json::array();
            for (const auto& p : curve.samples) xy.push_back(vec(p));
            result["points"] = xy;
            write_text(output, dump(result) + "\n", out);
            return ok;
        }

        if (wall_cmd->parsed()) {
            check_format(wall_format);
            const auto zeros = phasediag::wall_zeros(d, dprime);
            const auto trace = phasediag::wall_trace(d, dprime, t_samples, phi_samples);
            if (wall_format == "csv") {
                std::string csv = "t,min_norm\n";
                for (const auto& s : trace) csv += format_number(s.t) + "," + format_number(s.min_norm) + "\n";
                write_text(output, csv, out);
                return ok;
            }
            json trace_json = json::array();
            for (const auto& s : trace) trace_json.push_back({{"t", s.t}, {"min_norm", s.min_norm}});
            json result = {{"d", d},
                           {"dprime", dprime},
                           {"dirac_count", phasediag::dirac_count(d, dprime)},
                           {"zeros", zeros},
                           {"trace", trace_json}};
            write_text(output, dump(result) + "\n", out);
            return ok;
        }

        if (fan_cmd->parsed()) {
            const phasediag::FanDiagram fan{labels};
            const auto report = phasediag::verify_realization(fan, phasediag::fan_family(fan), radius, tolerance);
            json measured = json::array();
            for (const auto& m : report.measured) measured.push_back(m ? json(*m) : json("DEG"));
            json result = {{"k", fan.k()},
                           {"expected", report.expected},
                           {"measured", measured},
                           {"ray_min_norm", report.ray_min_norm},
                           {"ray_degenerate", report.ray_degenerate},
                           {"off_ray_min_norm", report.off_ray_min_norm},
                           {"degenerate_off_ray", report.degenerate_angles},
                           {"ok", report.ok}};
            out << dump(result) << '\n';
            if (!report.ok) {
                return emit_failure(
                    err, {{"error", {{"class", "numeric"}, {"kind", "RealizationFailure"}, {"message", "fan realization did not verify"}}}},
                    numeric_error);
            }
            return ok;
        }

        if (validate_cmd->parsed()) {
            const auto config = load_model_config(model_config);
            const auto [nx, ny] = parse_grid(validate_grid_text);
            std::mt19937_64 rng(seed);
            json rows = json::array();
            bool all_agree = true;
            int accepted = 0;
            int attempts = 0;
            while (accepted < points) {
                if (++attempts > 50 * points) {
                    throw NumericError("SamplingFailure", "too few non-degenerate parameter points in the sampling box");
                }
                const auto params = sample_params(config.model, config.params, rng);
                if (phasediag::minimum_gap(config.model, params).gap < 1e-3) continue;
                ++accepted;
                json row = {{"params", params_json(config.model, params)}};
                if (config.model.bands == 2) {
                    invariants::CrossValidateOptions options;
                    options.berry_grid = {nx, ny};
                    try {
                        const auto report = invariants::cross_validate(config.model, params, options);
                        row["value"] = report.value;
                        row["unanimous"] = true;
                        json values = json::array();
                        for (const auto& r : report.runs) values.push_back(r.result ? json(r.result->value) : json(nullptr));
                        row["values"] = values;
                    } catch (const invariants::EngineDisagreement& e) {
                        all_agree = false;
                        row["unanimous"] = false;
                        row["report"] = cross_json(e.report, false);
                    }
                } else {
                    json values = json::array();
                    int sum = 0;
                    for (int b = 0; b < config.model.bands; ++b) {
                        const int c = invariants::chern_berry_lattice(config.model, params, b, {nx, ny}).value;
                        values.push_back(c);
                        sum += c;
                    }
                    row["values"] = values;
                    row["band_sum"] = sum;
                    row["unanimous"] = sum == 0;
                    if (sum != 0) all_agree = false;
                }
                rows.push_back(row);
            }
            json result = {{"model", config.model.name}, {"seed", seed}, {"points", rows}, {"unanimous", all_agree}};
            out << dump(result) << '\n';
            if (!all_agree) {
                return emit_failure(
                    err, {{"error", {{"class", "numeric"}, {"kind", "EngineDisagreement"}, {"message", "engines disagree at some sampled point"}}}},
                    numeric_error);
            }
            return ok;
        }

        out << app.help();
        return ok;
    } catch (const invariants::DegenerateFamily& e) {
        json payload = error_json(e);
        payload["error"]["k"] = vec(e.k);
        payload["error"]["gap"] = e.gap;
        return emit_failure(err, payload, numeric_error);
    } catch (const invariants::ResolutionError& e) {
        json payload = error_json(e);
        payload["error"]["raw"] = e.raw;
        return emit_failure(err, payload, numeric_error);
    } catch (const Error& e) {
        return emit_failure(err, error_json(e), e.error_class() == ErrorClass::config ? config_error : numeric_error);
    } catch (const std::exception& e) {
        return emit_failure(err, {{"error", {{"class", "numeric"}, {"kind", "InternalError"}, {"message", e.what()}}}},
                            numeric_error);
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace chern::cli
