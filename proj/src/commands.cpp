#include "shiftest/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "shiftest/criterion.hpp"
#include "shiftest/csv.hpp"
#include "shiftest/inference.hpp"
#include "shiftest/landmark.hpp"
#include "shiftest/optimizer.hpp"
#include "shiftest/svg.hpp"

namespace shiftest {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;
constexpr int kGridPoints = 629;

json to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

json to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
    out << doc.dump(2) << '\n';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
    return out;
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

OptimizerConfig optimizer_config(const RunConfig& config) {
    OptimizerConfig opt;
    opt.max_iterations = config.max_iterations;
    opt.gradient_tolerance = config.gradient_tolerance;
    opt.validate();
    return opt;
}

void warn(std::ostream& os, std::vector<std::string>& log, const std::string& msg) {
    os << "warning: " << msg << '\n';
    log.push_back(msg);
}

// Curve data read from disk and made ready for the odd-length transform.
struct LoadedCurves {
    CurveTable table;
    double period = 2.0 * kPi;
    double t0 = 0.0;
    bool truncated = false;
};

LoadedCurves load_curves(const RunConfig& config, std::ostream& os, std::vector<std::string>& log) {
    if (config.input.empty()) throw InputError("--input is required");
    LoadedCurves out{read_curve_table(config.input)};
    CurveTable& table = out.table;
    if (table.curves() < 2) throw InputError("need at least 2 curve columns");

    std::optional<double> period = config.period;
    if (!period) period = table.inferred_period();
    if (table.length() % 2 == 0) {
        if (!config.truncate_even)
            throw InputError(fmt::format(
                "input has an even number of samples ({}); rerun with --truncate-even to drop "
                "the last sample",
                table.length()));
        const int n = table.length();
        table.values.conservativeResize(Eigen::NoChange, n - 1);
        if (table.time) table.time->pop_back();
        // Sample spacing is kept, so the period shrinks by one step.
        if (period) *period *= static_cast<double>(n - 1) / n;
        out.truncated = true;
        warn(os, log, fmt::format("even sample count {}: dropped the last sample", n));
    }
    if (!period) {
        period = 2.0 * kPi;
        warn(os, log, "no period given and no t column; assuming 2*pi");
    }
    if (!(*period > 0.0)) throw InputError("period must be positive");
    out.period = *period;
    if (table.time && !table.time->empty()) out.t0 = table.time->front();
    return out;
}

std::vector<double> time_axis(double t0, double period, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = t0 + period * i / n;
    return t;
}

std::string weight_slug(const WeightScheme& w) {
    switch (w.kind()) {
        case WeightScheme::Kind::Power:
            return fmt::format("power{}", w.beta());
        case WeightScheme::Kind::Unit:
            return "unit";
        case WeightScheme::Kind::Custom:
            break;
    }
    return "custom";
}

std::vector<double> read_weight_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open weight file {}", path.string()));
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::istringstream ss(line);
        double v = 0.0;
        if (!(ss >> v)) {
            if (values.empty() && line_no == 1) continue;  // header
            throw InputError(fmt::format("weight file line {} is not a number", line_no));
        }
        values.push_back(v);
    }
    return values;
}

}  // namespace

WeightScheme parse_weights(const std::string& spec, int cutoff) {
    if (spec == "unit") return WeightScheme::unit(cutoff);
    if (spec.rfind("power:", 0) == 0) {
        const std::string arg = spec.substr(6);
        std::size_t used = 0;
        double beta = 0.0;
        try {
            beta = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != arg.size())
            throw InputError(fmt::format("bad power exponent in '{}'", spec));
        return WeightScheme::power(beta, cutoff);
    }
    if (spec.rfind("file:", 0) == 0) return WeightScheme::custom(read_weight_file(spec.substr(5)), cutoff);
    throw InputError(fmt::format("unknown weight spec '{}' (power:<beta>|unit|file:<path>)", spec));
}

Pattern parse_pattern(const std::string& spec) {
    if (spec == "sinc15") return Pattern::sinc15();
    if (spec == "cosine") return Pattern::cosine();
    if (spec.rfind("file:", 0) == 0) {
        const CurveTable t = read_curve_table(spec.substr(5));
        const Eigen::VectorXd row = t.values.row(0).transpose();
        return Pattern::samples(std::vector<double>(row.data(), row.data() + row.size()));
    }
    throw InputError(fmt::format("unknown pattern '{}' (sinc15|cosine|file:<path>)", spec));
}

SimulationSpec simulation_spec(const RunConfig& config) {
    SimulationSpec spec;
    spec.pattern = parse_pattern(config.pattern);
    spec.curves = config.curves;
    spec.samples = config.samples;
    spec.sigma = config.sigma;
    if (config.period) spec.period = *config.period;
    spec.replicates = config.replicates;
    spec.seed = config.seed;
    spec.level = config.confidence;
    spec.optimizer = optimizer_config(config);
    spec.threads = config.threads;
    spec.validate();
    spec.weights = parse_weights(config.weights, spec.cutoff());
    return spec;
}

void cmd_estimate(const RunConfig& config, std::ostream& warnings) {
    std::vector<std::string> log;
    const LoadedCurves loaded = load_curves(config, warnings, log);
    const CurveTable& table = loaded.table;
    const CurveSet curves(table.values, loaded.period);
    const int J = curves.curves();
    const int n = curves.length();

    const SpectralTable spectrum = transform(curves);
    const WeightScheme weights = parse_weights(config.weights, spectrum.cutoff());
    for (const auto& w : weights.warnings()) warn(warnings, log, w);
    const CriterionContext ctx(spectrum, weights);

    const EstimationResult est = minimize(ctx, optimizer_config(config), loaded.period);
    if (!est.converged)
        warn(warnings, log,
             fmt::format("optimizer stopped after {} iterations with gradient {:.3g}",
                         est.iterations, est.gradient_norm));

    const CovarianceReport rep = infer(ctx, est, loaded.period, config.confidence);
    const IdentifiabilityCheck ident = check_identifiability(ctx, rep.sigma2_hat);
    if (!ident.satisfied)
        warn(warnings, log,
             "no two coprime frequencies carry signal above the noise level; shifts may not be "
             "identifiable");

    prepare_dir(config.output_dir);
    const double to_time = loaded.period / (2.0 * kPi);
    {
        auto out = open_output(config.output_dir / "shifts.csv");
        out << "j,theta_hat,alpha_hat,std_error,ci_lower,ci_upper\n";
        out << "1,0,0,0,0,0\n";
        for (int k = 0; k < J - 1; ++k)
            out << k + 2 << ',' << format_double(est.theta_hat[k + 1]) << ','
                << format_double(est.alpha_hat.free()[k]) << ','
                << format_double(rep.std_errors[k] * to_time) << ','
                << format_double(rep.time_intervals[k].lower) << ','
                << format_double(rep.time_intervals[k].upper) << '\n';
    }

    const Eigen::MatrixXd aligned = realign(spectrum, est.alpha_hat.full());
    const std::vector<double> t = time_axis(loaded.t0, loaded.period, n);
    write_curve_table(config.output_dir / "aligned.csv", table.names, t, aligned);
    {
        auto out = open_output(config.output_dir / "mean.csv");
        out << "t,raw_mean,aligned_mean\n";
        const Eigen::RowVectorXd raw = curves.samples().colwise().mean();
        const Eigen::RowVectorXd al = aligned.colwise().mean();
        for (int i = 0; i < n; ++i)
            out << format_double(t[i]) << ',' << format_double(raw[i]) << ','
                << format_double(al[i]) << '\n';
    }
    {
        auto out = open_output(config.output_dir / "covariance.csv");
        const Eigen::MatrixXd cov = rep.covariance(n);
        for (int k = 0; k < J - 1; ++k) out << (k ? "," : "") << "alpha_" << k + 2;
        out << '\n';
        for (int r = 0; r < J - 1; ++r) {
            for (int c = 0; c < J - 1; ++c) out << (c ? "," : "") << format_double(cov(r, c));
            out << '\n';
        }
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "estimate";
    report["curves"] = J;
    report["samples"] = n;
    report["period"] = loaded.period;
    report["truncated_even"] = loaded.truncated;
    report["weights"] = weights.describe();
    report["criterion_value"] = est.criterion_value;
    report["sigma2_hat"] = rep.sigma2_hat;
    report["gamma_scalar"] = J > 1 ? rep.gamma_hat(0, 0) / 2.0 : 0.0;
    report["confidence_level"] = config.confidence;
    report["optimizer"] = {{"converged", est.converged},
                           {"iterations", est.iterations},
                           {"gradient_norm", est.gradient_norm},
                           {"start_index", est.start_index}};
    json id = {{"satisfied", ident.satisfied},
               {"threshold", ident.threshold},
               {"active_frequencies", ident.active}};
    id["witness"] = ident.witness ? json::array({ident.witness->first, ident.witness->second})
                                  : json(nullptr);
    report["identifiability"] = id;
    report["warnings"] = log;
    write_json(config.output_dir / "report.json", report);
}

void cmd_simulate(const RunConfig& config, std::ostream& warnings) {
    const SimulationSpec spec = simulation_spec(config);
    for (const auto& w : spec.weights.warnings()) warnings << "warning: " << w << '\n';
    const MonteCarloSummary s = run_study(spec);
    const double to_time = spec.period / (2.0 * kPi);

    prepare_dir(config.output_dir);
    prepare_dir(config.output_dir / "plotdata");
    prepare_dir(config.output_dir / "figures");

    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["command"] = "simulate";
    summary["spec"] = {{"pattern", spec.pattern.name()}, {"curves", spec.curves},
                       {"samples", spec.samples},        {"sigma", spec.sigma},
                       {"period", spec.period},          {"weights", spec.weights.describe()},
                       {"replicates", spec.replicates},  {"seed", spec.seed},
                       {"confidence_level", spec.level}};
    summary["bias"] = to_json(s.bias);
    summary["empirical_covariance"] = to_json(s.empirical_covariance);
    summary["theoretical_covariance"] = to_json(s.theoretical_covariance);
    summary["gamma_scalar_true"] = s.gamma_scalar_true;
    summary["coverage"] = to_json(s.coverage);
    summary["std_dev"] = to_json(s.std_dev);
    summary["rmse"] = s.rmse;
    summary["rmse_landmark"] = s.rmse_landmark ? json(*s.rmse_landmark) : json(nullptr);
    summary["median_abs_error"] = s.median_abs_error;
    summary["mean_sigma2_hat"] = s.mean_sigma2_hat;
    summary["nonconverged"] = s.nonconverged;
    summary["inference_failures"] = s.inference_failures;
    summary["landmark_failures"] = s.landmark_failures;
    write_json(config.output_dir / "summary.json", summary);

    {
        auto out = open_output(config.output_dir / "replicates.csv");
        out << "replicate,j,theta_true,theta_hat,alpha_true,alpha_hat,std_error,covered,"
               "theta_landmark\n";
        for (int r = 0; r < s.replicates; ++r) {
            const ReplicateResult& run = s.runs[r];
            for (int k = 0; k < spec.curves - 1; ++k) {
                out << r << ',' << k + 2 << ',' << format_double(run.theta_true[k + 1]) << ','
                    << format_double(run.theta_hat[k + 1]) << ','
                    << format_double(run.alpha_true[k]) << ',' << format_double(run.alpha_hat[k])
                    << ',';
                if (run.inference_ok)
                    out << format_double(run.std_errors[k]) << ',' << (run.covered[k] ? 1 : 0);
                else
                    out << ',';
                out << ',';
                if (run.theta_landmark) out << format_double((*run.theta_landmark)[k + 1]);
                out << '\n';
            }
        }
    }

    // Criterion profiles for the two-curve weight sweep.
    const std::vector<double> sigmas{1.0, 3.0, 5.0, 7.0};
    const std::vector<WeightScheme> families{WeightScheme::unit(1), WeightScheme::power(1.3, 1),
                                             WeightScheme::power(2.0, 1)};
    const auto grids = weight_sweep(spec, kPi / 3.0 * to_time, sigmas, families, kGridPoints);
    for (std::size_t g = 0; g < grids.size(); ++g) {
        const auto& grid = grids[g];
        const std::string stem =
            fmt::format("criterion_sigma{}_{}", grid.sigma, weight_slug(families[g % families.size()]));
        auto out = open_output(config.output_dir / "plotdata" / (stem + ".csv"));
        out << "alpha,criterion\n";
        Series series{grid.weights, {}, {}, false};
        for (const auto& [a, v] : grid.points) {
            out << format_double(a) << ',' << format_double(v) << '\n';
            series.x.push_back(a);
            series.y.push_back(v);
        }
        Chart chart{fmt::format("criterion, sigma = {}, weights {}", grid.sigma, grid.weights),
                    "alpha_2", "M_n", {series}, kPi / 3.0, true, false};
        write_svg(config.output_dir / "figures" / (stem + ".svg"), chart);
    }

    {
        auto out = open_output(config.output_dir / "plotdata" / "scatter.csv");
        out << "theta_true,theta_hat\n";
        Series series{"estimates", {}, {}, true};
        for (const auto& run : s.runs)
            for (int j = 1; j < spec.curves; ++j) {
                out << format_double(run.theta_true[j]) << ',' << format_double(run.theta_hat[j])
                    << '\n';
                series.x.push_back(run.theta_true[j]);
                series.y.push_back(run.theta_hat[j]);
            }
        write_svg(config.output_dir / "figures" / "scatter.svg",
                  Chart{"true against estimated shifts", "theta*", "theta_hat", {series}, 0.0,
                        false, true});
    }

    {
        // Raw and realigned cross-sectional means for the first replicate.
        const SimulatedData data = generate(spec, 0);
        const SpectralTable table = transform(data.curves);
        Eigen::VectorXd alpha(spec.curves);
        alpha[0] = 0.0;
        alpha.tail(spec.curves - 1) = s.runs[0].alpha_hat;
        const Eigen::MatrixXd aligned = realign(table, alpha);
        const Eigen::RowVectorXd raw = data.curves.samples().colwise().mean();
        const Eigen::RowVectorXd al = aligned.colwise().mean();
        auto out = open_output(config.output_dir / "plotdata" / "means.csv");
        out << "t,pattern,raw_mean,aligned_mean\n";
        Series pat{"pattern", {}, {}, false};
        Series rs{"raw mean", {}, {}, false};
        Series as{"aligned mean", {}, {}, false};
        for (int i = 0; i < spec.samples; ++i) {
            const double t = -0.5 * spec.period + i * spec.period / spec.samples;
            const double f = spec.pattern.value(t, spec.period);
            out << format_double(t) << ',' << format_double(f) << ',' << format_double(raw[i])
                << ',' << format_double(al[i]) << '\n';
            for (Series* ser : {&pat, &rs, &as}) ser->x.push_back(t);
            pat.y.push_back(f);
            rs.y.push_back(raw[i]);
            as.y.push_back(al[i]);
        }
        write_svg(config.output_dir / "figures" / "means.svg",
                  Chart{"cross-sectional means", "t", "value", {pat, rs, as}, 0.0, false, false});
    }
}

void cmd_compare_landmark(const RunConfig& config, std::ostream& warnings) {
    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "compare-landmark";
    std::vector<std::string> log;

    if (!config.input.empty()) {
        const LoadedCurves loaded = load_curves(config, warnings, log);
        const CurveSet curves(loaded.table.values, loaded.period);
        const SpectralTable spectrum = transform(curves);
        const CriterionContext ctx(spectrum, parse_weights(config.weights, spectrum.cutoff()));
        const EstimationResult est = minimize(ctx, optimizer_config(config), loaded.period);
        const auto locs = landmark_locations(curves, LandmarkConfig{});

        prepare_dir(config.output_dir);
        auto out = open_output(config.output_dir / "comparison.csv");
        out << "j,theta_m_estimator,theta_landmark,landmark_flag\n";
        int flagged = 0;
        for (int j = 0; j < curves.curves(); ++j) {
            out << j + 1 << ',' << format_double(est.theta_hat[j]) << ',';
            if (locs[0] && locs[j]) {
                double d = std::fmod(*locs[j] - *locs[0], loaded.period);
                if (d > 0.5 * loaded.period) d -= loaded.period;
                if (d <= -0.5 * loaded.period) d += loaded.period;
                out << format_double(d) << ",0\n";
            } else {
                out << ",1\n";
                ++flagged;
                warn(warnings, log, fmt::format("landmark undefined for curve {}", j + 1));
            }
        }
        report["mode"] = "input";
        report["curves"] = curves.curves();
        report["samples"] = curves.length();
        report["landmark_flagged"] = flagged;
        report["warnings"] = log;
        write_json(config.output_dir / "report.json", report);
        return;
    }

    SimulationSpec spec = simulation_spec(config);
    spec.with_inference = false;
    const MonteCarloSummary s = run_study(spec);
    prepare_dir(config.output_dir);
    auto out = open_output(config.output_dir / "comparison.csv");
    out << "replicate,j,theta_true,theta_m_estimator,theta_landmark,landmark_flag\n";
    for (int r = 0; r < s.replicates; ++r) {
        const ReplicateResult& run = s.runs[r];
        for (int j = 0; j < spec.curves; ++j) {
            out << r << ',' << j + 1 << ',' << format_double(run.theta_true[j]) << ','
                << format_double(run.theta_hat[j]) << ',';
            if (run.theta_landmark)
                out << format_double((*run.theta_landmark)[j]) << ",0\n";
            else
                out << ",1\n";
        }
    }
    report["mode"] = "simulation";
    report["replicates"] = s.replicates;
    report["curves"] = spec.curves;
    report["samples"] = spec.samples;
    report["sigma"] = spec.sigma;
    report["rmse_m_estimator"] = s.rmse;
    report["rmse_landmark"] = s.rmse_landmark ? json(*s.rmse_landmark) : json(nullptr);
    report["landmark_failures"] = s.landmark_failures;
    report["warnings"] = log;
    write_json(config.output_dir / "report.json", report);
}

int exit_code(Stage stage) {
    switch (stage) {
        case Stage::Input:
            return 2;
        case Stage::Estimation:
            return 3;
        case Stage::Inference:
            return 4;
    }
    return 1;
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& errors) {
    const char* stage_names[] = {"input", "estimation", "inference"};
    try {
        if (name == "estimate")
            cmd_estimate(config, errors);
        else if (name == "simulate")
            cmd_simulate(config, errors);
        else if (name == "compare-landmark")
            cmd_compare_landmark(config, errors);
        else
            throw InputError(fmt::format("unknown command '{}'", name));
    } catch (const Error& e) {
        errors << "error (" << stage_names[static_cast<int>(e.stage())] << "): " << e.what() << '\n';
        return exit_code(e.stage());
    }
    return 0;
}

}  // namespace shiftest
