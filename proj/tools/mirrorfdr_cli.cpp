// mirrorfdr command-line front end: simulate / select / bench.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <omp.h>

#include "mirrorfdr/bench.hpp"
#include "mirrorfdr/csv.hpp"
#include "mirrorfdr/rng.hpp"

using json = nlohmann::ordered_json;
using namespace mirrorfdr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void apply_threads(int threads) {
    if (threads <= 0) {
        const char* env = std::getenv("MIRRORFDR_THREADS");
        if (env) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

LambdaRule parse_lambda(const std::string& s) {
    LambdaRule rule;
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "cv") {
        rule.kind = LambdaRule::Kind::cv;
        rule.folds = arg.empty() ? 10 : std::stoi(arg);
        if (rule.folds < 2) throw UsageError("--lambda cv needs k >= 2");
    } else if (head == "theory") {
        rule.kind = LambdaRule::Kind::theory;
        rule.c = arg.empty() ? 1.0 : std::stod(arg);
        if (rule.c <= 0) throw UsageError("--lambda theory needs c > 0");
    } else {
        throw UsageError("--lambda must be cv[:K] or theory[:C]");
    }
    return rule;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    int n = 100, p = 10, p1 = 0, blocks = 10;
    std::string family = "gaussian", covariance = "identity", scale;
    std::string signal_mode = "fixed";
    double dispersion = 2.0, r = 0.0, signal = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    GlmFamily family = family_from_name(a.family, a.dispersion);
    CovarianceSpec cov = covariance_from_name(a.covariance, a.r, a.blocks);
    SignalSpec sig;
    sig.p1 = a.p1;
    sig.mode = a.signal_mode == "gaussian" ? MagnitudeMode::gaussian : MagnitudeMode::fixed;
    sig.value = a.signal;
    DesignScale scale = a.scale == "inv_n" ? DesignScale::inv_n : DesignScale::unit;

    auto rng = make_rng(a.seed, 100, 0);
    Eigen::MatrixXd sigma = make_covariance(cov, a.p);
    Eigen::MatrixXd X = sample_design(a.n, a.p, sigma, scale, rng);
    Coefficients coef = sample_coefficients(a.p, sig, rng);
    Eigen::VectorXd y = sample_response(X, coef.beta, family, rng);

    std::vector<std::string> header;
    for (int j = 0; j < a.p; ++j) header.push_back("x" + std::to_string(j + 1));
    header.push_back("y");
    std::vector<std::vector<std::string>> rows(a.n);
    for (int i = 0; i < a.n; ++i) {
        for (int j = 0; j < a.p; ++j) rows[i].push_back(fmt(X(i, j)));
        rows[i].push_back(fmt(y[i]));
    }
    write_csv(a.out, header, rows);

    json truth;
    truth["seed"] = a.seed;
    truth["index_convention"] = "1-based";
    truth["beta"] = std::vector<double>(coef.beta.data(), coef.beta.data() + a.p);
    json s1 = json::array();
    for (int j : coef.s1) s1.push_back(j + 1);
    truth["s1"] = s1;
    std::ofstream tf(a.out + ".truth.json");
    tf << truth.dump(2) << '\n';
    std::cout << "wrote " << a.out << " (" << a.n << " x " << a.p + 1 << ") and truth sidecar\n";
    return kExitOk;
}

// ---- select ----------------------------------------------------------------

struct SelectArgs {
    std::string data, response = "y";
    std::string family = "gaussian", method = "ds", regime = "moderate", f = "product";
    std::string lambda = "cv";
    double dispersion = 2.0, q = 0.1;
    int m = 50, threads = 0;
    std::uint64_t seed = 0;
    std::string out = "selection";
};

int cmd_select(const SelectArgs& a) {
    if (a.q <= 0.0 || a.q >= 1.0) throw UsageError("q must lie in (0,1)");
    CsvTable table = read_csv(a.data);
    int resp = -1;
    for (size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == a.response) resp = static_cast<int>(c);
    if (resp < 0) throw UsageError("response column '" + a.response + "' not found");
    if (table.header.size() < 2) throw UsageError("need at least one feature column");
    if (table.nrows() < 1) throw UsageError("no data rows");

    const int n = static_cast<int>(table.nrows());
    const int p = static_cast<int>(table.ncols()) - 1;
    Dataset data;
    data.family = family_from_name(a.family, a.dispersion);
    data.X.resize(n, p);
    data.y.resize(n);
    std::vector<std::string> feature_names;
    for (int c = 0, k = 0; c < p + 1; ++c)
        if (c != resp) feature_names.push_back(table.header[c]), ++k;
    for (int i = 0; i < n; ++i) {
        data.y[i] = table.rows[i][resp];
        for (int c = 0, k = 0; c < p + 1; ++c)
            if (c != resp) data.X(i, k++) = table.rows[i][c];
    }
    data.validate();

    MirrorConfig cfg{a.q, f_choice_from_name(a.f), a.seed};
    SelectorOptions opts;
    opts.lambda_main = parse_lambda(a.lambda);

    Method method = method_from_name(a.method);
    Regime regime = regime_from_name(a.regime);

    MirrorResult result;
    std::string statistic_kind = "mirror";
    if (method == Method::ds) {
        result = regime == Regime::moderate ? ds_moderate(data, cfg, opts)
                                            : ds_high_glm(data, cfg, opts);
    } else if (method == Method::mds) {
        BaseSelector base = regime == Regime::moderate ? BaseSelector::ds_moderate
                                                       : BaseSelector::ds_high_glm;
        result = mds(data, base, a.m, cfg, opts).result;
        statistic_kind = "inclusion_rate";
    } else if (method == Method::gm) {
        result = gm_moderate(data, cfg, opts);
    } else {
        throw UsageError("select supports methods ds, mds, gm");
    }

    std::vector<int> selected_flag(p, 0);
    for (int j : result.selected) selected_flag[j] = 1;
    std::vector<std::vector<std::string>> rows(p);
    for (int j = 0; j < p; ++j)
        rows[j] = {feature_names[j], fmt(result.mirror[j]), std::to_string(selected_flag[j])};
    write_csv(a.out + ".csv", {"feature", statistic_kind, "selected"}, rows);

    json summary;
    summary["method"] = a.method;
    summary["regime"] = a.regime;
    summary["family"] = a.family;
    summary["f"] = a.f;
    summary["q"] = a.q;
    summary["seed"] = a.seed;
    summary["n"] = n;
    summary["p"] = p;
    summary["index_convention"] = "1-based";
    summary["tau_q"] = result.cutoff ? json(*result.cutoff) : json(nullptr);
    summary["fdp_hat"] = result.fdp_hat ? json(*result.fdp_hat) : json(nullptr);
    summary["selected_count"] = result.selected.size();
    json sel = json::array();
    for (int j : result.selected) sel.push_back(feature_names[j]);
    summary["selected"] = sel;
    summary["warnings"] = result.warnings;
    std::ofstream sf(a.out + ".json");
    sf << summary.dump(2) << '\n';

    std::cout << "selected " << result.selected.size() << " of " << p << " features (q="
              << a.q << ")\n";
    return kExitOk;
}

// ---- bench -----------------------------------------------------------------

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw UsageError("unknown key '" + it.key() + "' in " + where);
    }
}

Scenario parse_scenario(const json& js, size_t index) {
    std::string where = "scenarios[" + std::to_string(index) + "]";
    reject_unknown(js, {"name", "n", "p", "p1", "family", "dispersion", "covariance",
                        "signal", "q", "method", "m", "reps", "seed", "regime", "scale",
                        "f", "lambda"},
                   where);
    Scenario sc;
    sc.name = js.value("name", "cell" + std::to_string(index));
    sc.n = js.at("n").get<int>();
    sc.p = js.at("p").get<int>();
    sc.p1 = js.at("p1").get<int>();
    sc.family = family_from_name(js.value("family", "gaussian"), js.value("dispersion", 2.0));
    if (js.contains("covariance")) {
        const json& cov = js["covariance"];
        reject_unknown(cov, {"kind", "r", "blocks"}, where + ".covariance");
        sc.covariance = covariance_from_name(cov.value("kind", "identity"),
                                             cov.value("r", 0.0), cov.value("blocks", 10));
    }
    if (js.contains("signal")) {
        const json& sig = js["signal"];
        reject_unknown(sig, {"mode", "value"}, where + ".signal");
        sc.signal.mode = sig.value("mode", "fixed") == std::string("gaussian")
                             ? MagnitudeMode::gaussian
                             : MagnitudeMode::fixed;
        sc.signal.value = sig.value("value", 0.0);
    }
    sc.signal.p1 = sc.p1;
    sc.q = js.value("q", 0.1);
    sc.method = method_from_name(js.value("method", "ds"));
    sc.m = js.value("m", 50);
    sc.reps = js.value("reps", 20);
    sc.seed = js.value("seed", 0ULL);
    sc.regime = regime_from_name(js.value("regime", "moderate"));
    if (js.contains("scale"))
        sc.scale = js["scale"].get<std::string>() == "inv_n" ? DesignScale::inv_n
                                                             : DesignScale::unit;
    sc.f_choice = f_choice_from_name(js.value("f", "product"));
    if (js.contains("lambda")) {
        const json& lam = js["lambda"];
        reject_unknown(lam, {"rule", "c", "folds"}, where + ".lambda");
        std::string rule = lam.value("rule", "cv");
        if (rule == "cv") {
            sc.selector.lambda_main.kind = LambdaRule::Kind::cv;
            sc.selector.lambda_main.folds = lam.value("folds", 10);
        } else if (rule == "theory") {
            sc.selector.lambda_main.kind = LambdaRule::Kind::theory;
            sc.selector.lambda_main.c = lam.value("c", 1.0);
        } else {
            throw UsageError("lambda.rule must be cv or theory in " + where);
        }
    }
    return sc;
}

struct BenchArgs {
    std::string runfile;
    std::string out;  // overrides the runfile output path
    int threads = 0;
};

int cmd_bench(const BenchArgs& a) {
    std::ifstream in(a.runfile);
    if (!in) throw UsageError("cannot open run file: " + a.runfile);
    json js;
    try {
        in >> js;
    } catch (const json::exception& e) {
        throw UsageError(std::string("run file is not valid JSON: ") + e.what());
    }
    reject_unknown(js, {"output", "scenarios"}, "run file");
    if (!js.contains("scenarios") || !js["scenarios"].is_array() || js["scenarios"].empty())
        throw UsageError("run file needs a nonempty 'scenarios' array");

    std::vector<Scenario> grid;
    for (size_t i = 0; i < js["scenarios"].size(); ++i)
        grid.push_back(parse_scenario(js["scenarios"][i], i));
    for (auto& sc : grid) {
        try {
            sc.validate();
        } catch (const std::exception& e) {
            throw UsageError(std::string("scenario '") + sc.name + "': " + e.what());
        }
    }

    std::string out = !a.out.empty() ? a.out : js.value("output", "bench.csv");
    std::vector<BenchResult> results = run_bench(grid);
    std::string csv = bench_csv(results);
    std::ofstream of(out);
    if (!of) throw UsageError("cannot write output: " + out);
    of << csv;
    std::cout << csv;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDR-controlled feature selection in GLMs via mirror statistics"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
    simulate->add_option("--n", sim.n)->required();
    simulate->add_option("--p", sim.p)->required();
    simulate->add_option("--p1", sim.p1);
    simulate->add_option("--family", sim.family)
        ->check(CLI::IsMember({"gaussian", "logistic", "poisson", "negbin"}));
    simulate->add_option("--dispersion", sim.dispersion);
    simulate->add_option("--covariance", sim.covariance);
    simulate->add_option("--r", sim.r);
    simulate->add_option("--blocks", sim.blocks);
    simulate->add_option("--signal", sim.signal);
    simulate->add_option("--signal-mode", sim.signal_mode)
        ->check(CLI::IsMember({"fixed", "gaussian"}));
    simulate->add_option("--scale", sim.scale)->check(CLI::IsMember({"unit", "inv_n"}));
    simulate->add_option("--seed", sim.seed);
    simulate->add_option("--out", sim.out)->required();

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "run a selector on a dataset CSV");
    select->add_option("--data", sel.data)->required();
    select->add_option("--response", sel.response);
    select->add_option("--family", sel.family)
        ->check(CLI::IsMember({"gaussian", "logistic", "poisson", "negbin"}));
    select->add_option("--dispersion", sel.dispersion);
    select->add_option("--method", sel.method)
        ->check(CLI::IsMember({"ds", "mds", "gm", "bhq-mle", "bhq-debiased"}));
    select->add_option("--regime", sel.regime)->check(CLI::IsMember({"moderate", "high"}));
    select->add_option("--q", sel.q);
    select->add_option("--f", sel.f)->check(CLI::IsMember({"min2", "product", "sum"}));
    select->add_option("--m", sel.m);
    select->add_option("--lambda", sel.lambda);
    select->add_option("--seed", sel.seed);
    select->add_option("--threads", sel.threads);
    select->add_option("--out", sel.out);

    BenchArgs ben;
    auto* bench = app.add_subcommand("bench", "run a benchmark grid from a JSON run file");
    bench->add_option("runfile", ben.runfile)->required();
    bench->add_option("--out", ben.out);
    bench->add_option("--threads", ben.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*select) {
            apply_threads(sel.threads);
            return cmd_select(sel);
        }
        apply_threads(ben.threads);
        return cmd_bench(ben);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "method failure: " << e.what() << '\n';
        return kExitRuntime;
    }
}
