// Command-line front end: closed-form prices, coin analytics, Monte Carlo
// simulation, the static and dynamic exponential-utility solvers, and a
// `figures` mode that regenerates every study as plot-ready CSV data.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bookmaker/expdynamic.hpp"
#include "bookmaker/semistatic.hpp"
#include "bookmaker/simulation.hpp"
#include "bookmaker/wealth.hpp"

using json = nlohmann::json;
using namespace bookmaker;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Buffered output: files materialize only after a run fully succeeds, so a
// failing command leaves no partial data behind.
class OutputSet {
  public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

    std::ostringstream& file(const std::string& name) { return buffers_[name]; }

    std::vector<std::string> flush() {
        std::vector<std::string> written;
        for (auto& [name, buffer] : buffers_) {
            const std::string path = dir_.empty() ? name : dir_ + "/" + name;
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw configuration_error("cannot open output file: " + path);
            out << buffer.str();
            written.push_back(path);
        }
        return written;
    }

  private:
    std::string dir_;
    std::map<std::string, std::ostringstream> buffers_;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("BOOKMAKER_OUT")) return env;
    return ".";
}

void print_summary(const SimulationSummary& s, std::ostream& os) {
    json j;
    j["paths"] = s.paths;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["min"] = s.min;
    j["q25"] = s.q25;
    j["median"] = s.median;
    j["q75"] = s.q75;
    j["max"] = s.max;
    j["win_prob"] = s.win_prob;
    j["win_prob_se"] = s.win_prob_se;
    j["mean_final_counts"] = s.mean_final_counts;
    j["majorant_breaches"] = s.majorant_breaches;
    os << j.dump(2) << "\n";
}

void write_samples_csv(const SimulationSummary& s, const std::string& params,
                       std::ostringstream& os) {
    const std::size_t n = s.mean_final_counts.size();
    os << "# params: " << params << "\n";
    os << "path_id,profit";
    for (std::size_t i = 0; i < n; ++i) os << ",q" << (i + 1);
    os << ",winning_outcome\n";
    for (std::size_t k = 0; k < s.records.size(); ++k) {
        const auto& r = s.records[k];
        os << k << "," << fmt(r.profit);
        for (double c : r.final_counts) os << "," << fmt(c);
        os << "," << r.winning_outcome << "\n";
    }
}

// ------------------------------------------------------------ json parsing

std::vector<double> as_doubles(const json& j, const std::string& what) {
    if (!j.is_array()) throw validation_error(what + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

OutcomeStructure parse_outcomes(const json& j) {
    if (!j.is_object()) throw validation_error("missing outcomes block");
    const std::string type = j.at("type").get<std::string>();
    if (type == "partition") return OutcomeStructure::partition(as_doubles(j.at("p"), "p"));
    if (type == "independent")
        return OutcomeStructure::independent(as_doubles(j.at("p"), "p"));
    if (type == "atoms") {
        const std::size_t n = j.at("n").get<std::size_t>();
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            Atom atom;
            atom.prob = a.at("prob").get<double>();
            for (const auto& m : a.at("members"))
                atom.members.push_back(m.get<int>() ? 1 : 0);
            atoms.push_back(std::move(atom));
        }
        return OutcomeStructure::explicit_atoms(n, std::move(atoms));
    }
    throw validation_error("unknown outcomes type: " + type);
}

IntensityModel parse_intensity_one(const json& j) {
    const std::string family = j.value("family", "ratio");
    const double kappa = j.value("kappa", 1.0);
    if (family == "ratio") return IntensityModel::ratio(kappa);
    if (family == "logratio") return IntensityModel::logratio(kappa);
    if (family == "exponential")
        return IntensityModel::exponential(kappa, j.at("beta").get<double>());
    throw validation_error("unknown intensity family: " + family);
}

std::vector<IntensityModel> parse_intensity(const json& j, std::size_t n) {
    std::vector<IntensityModel> out;
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(parse_intensity_one(item));
    } else {
        out.assign(n, parse_intensity_one(j));
    }
    if (out.size() != n)
        throw validation_error("intensity list does not match the outcome count");
    return out;
}

ProbabilityModel parse_probability(const json& j, const json& outcomes_j, double horizon) {
    const std::string type = j.value("type", "constant");
    if (type == "constant") {
        auto oc = parse_outcomes(outcomes_j);
        return ConstantProbability{oc.marginals()};
    }
    if (type == "poisson_goal") {
        PoissonGoalModel m;
        m.mu = j.at("mu").get<double>();
        m.horizon = j.value("horizon", horizon);
        const std::string kind = j.at("bet").value("kind", "at_least");
        m.bet.kind = kind == "exactly" ? GoalBet::Kind::exactly : GoalBet::Kind::at_least;
        m.bet.count = j.at("bet").value("count", 1);
        m.validate();
        return m;
    }
    if (type == "brownian_spread") {
        BrownianSpreadModel m;
        m.mu = j.at("mu").get<double>();
        m.sigma = j.at("sigma").get<double>();
        m.horizon = j.value("horizon", horizon);
        m.thresholds = as_doubles(j.at("thresholds"), "thresholds");
        m.validate();
        return m;
    }
    throw validation_error("unknown probability model: " + type);
}

PricingPolicy parse_policy(const json& j, const json& outcomes_j, double horizon) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "sqrt") return SqrtFeedbackPolicy{};
    if (type == "logratio_root") return LogRatioRootFeedbackPolicy{};
    if (type == "static") return StaticVectorPolicy{as_doubles(j.at("u"), "u")};
    if (type == "two_piece")
        return TwoPiecePolicy{as_doubles(j.at("v"), "v"), as_doubles(j.at("w"), "w"),
                              as_doubles(j.at("rho"), "rho")};
    if (type == "exp_series") {
        std::optional<BookVector> caps;
        if (j.contains("caps")) {
            caps = BookVector{};
            for (const auto& c : j.at("caps")) caps->push_back(c.get<long>());
        }
        auto model = std::make_shared<ExpDynamicModel>(
            j.at("gamma").get<double>(), j.at("beta").get<double>(), j.value("kappa", 1.0),
            parse_outcomes(outcomes_j), horizon, caps);
        return ExpUtilitySeriesPolicy{model, j.value("tol", 1e-10)};
    }
    throw validation_error("unknown policy type: " + type);
}

SimulationConfig parse_config(const json& j) {
    SimulationConfig cfg;
    const std::string arrivals = j.value("arrivals", "poisson");
    if (arrivals == "poisson")
        cfg.arrivals = ArrivalKind::poisson;
    else if (arrivals == "continuous")
        cfg.arrivals = ArrivalKind::continuous;
    else
        throw validation_error("unknown arrivals model: " + arrivals);
    cfg.horizon = j.value("horizon", 1.0);
    cfg.prob_model = parse_probability(j.value("probability", json{{"type", "constant"}}),
                                       j.value("outcomes", json{}), cfg.horizon);
    if (j.contains("outcomes")) cfg.outcomes = parse_outcomes(j.at("outcomes"));
    cfg.intensity =
        parse_intensity(j.value("intensity", json{{"family", "ratio"}}), cfg.dimension());
    cfg.policy = parse_policy(j.value("policy", json{{"type", "sqrt"}}),
                              j.value("outcomes", json{}), cfg.horizon);
    cfg.dt = j.value("dt", 0.0);
    cfg.paths = j.value("paths", std::size_t(1000));
    cfg.seed = j.value("seed", std::uint64_t(1));
    cfg.x0 = j.value("x0", 0.0);
    if (j.contains("q0")) cfg.q0 = as_doubles(j.at("q0"), "q0");
    if (j.contains("caps")) {
        cfg.caps = BookVector{};
        for (const auto& c : j.at("caps")) cfg.caps->push_back(c.get<long>());
    }
    cfg.threads = j.value("threads", 1u);
    return cfg;
}

// --------------------------------------------------------------- commands

struct GlobalFlags {
    std::string out_dir = default_out_dir();
    std::uint64_t seed = 0;  // 0: keep config/default
    std::size_t paths = 0;   // 0: keep config/default
    double dt = 0.0;         // 0: keep config/default
    unsigned threads = 0;    // 0: keep config/default
};

int cmd_price(const std::string& family, const std::vector<double>& probs, double kappa,
              double beta, const std::string& method) {
    IntensityModel model = family == "ratio"      ? IntensityModel::ratio(kappa)
                           : family == "logratio" ? IntensityModel::logratio(kappa)
                                                  : IntensityModel::exponential(kappa, beta);
    std::printf("p,u_star\n");
    for (double p : probs) {
        double u;
        if (method == "pointwise") {
            u = pointwise_optimize(model, p);
        } else if (method == "method3") {
            u = method3_consistency(model, p).u_star;
        } else {
            switch (model.family) {
                case RateFamily::ratio: u = optimal_price_ratio(p); break;
                case RateFamily::logratio: u = optimal_price_logratio(p); break;
                default: u = std::min(1.0, p + 1.0 / model.beta); break;
            }
        }
        std::printf("%s,%s\n", fmt(p).c_str(), fmt(u).c_str());
    }
    return 0;
}

int cmd_coin(double p_hat, const std::vector<double>& horizons, std::size_t mc_paths,
             std::uint64_t seed, unsigned threads) {
    std::printf("horizon,win_prob_exact");
    if (mc_paths > 0) std::printf(",win_prob_mc,mc_se");
    std::printf("\n");
    for (double T : horizons) {
        const double exact = coin_profit_prob_exact(p_hat, T);
        std::printf("%s,%s", fmt(T).c_str(), fmt(exact).c_str());
        if (mc_paths > 0) {
            SimulationConfig cfg;
            cfg.arrivals = ArrivalKind::poisson;
            cfg.prob_model = ConstantProbability{{p_hat, 1.0 - p_hat}};
            cfg.outcomes = OutcomeStructure::partition({p_hat, 1.0 - p_hat});
            cfg.intensity = {IntensityModel::ratio(), IntensityModel::ratio()};
            cfg.policy = SqrtFeedbackPolicy{};
            cfg.horizon = T;
            cfg.paths = mc_paths;
            cfg.seed = seed ? seed : 1;
            cfg.threads = threads ? threads : 1;
            auto s = run_poisson(cfg);
            std::printf(",%s,%s", fmt(s.win_prob).c_str(), fmt(s.win_prob_se).c_str());
        }
        std::printf("\n");
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const GlobalFlags& flags, bool samples) {
    std::ifstream in(config_path);
    if (!in) throw configuration_error("cannot open config file: " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error(std::string("config parse error: ") + e.what());
    }
    SimulationConfig cfg = parse_config(j);
    if (flags.seed) cfg.seed = flags.seed;
    if (flags.paths) cfg.paths = flags.paths;
    if (flags.dt > 0.0) cfg.dt = flags.dt;
    if (flags.threads) cfg.threads = flags.threads;
    cfg.validate();
    auto s = run(cfg);
    print_summary(s, std::cout);
    if (samples || j.value("output", json::object()).value("samples", false)) {
        OutputSet out(flags.out_dir);
        json params = j;
        params["seed"] = cfg.seed;
        params["paths"] = cfg.paths;
        write_samples_csv(s, params.dump(), out.file("samples.csv"));
        for (const auto& path : out.flush())
            std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_nba(std::size_t paths, std::uint64_t seed, const SpreadExperimentParams& params,
            unsigned threads, const std::string& out_dir, bool samples) {
    auto s = nba_experiment(params, paths, seed ? seed : 1, threads ? threads : 1);
    print_summary(s, std::cout);
    if (samples) {
        OutputSet out(out_dir);
        json p{{"mu", params.mu},          {"sigma", params.sigma},
               {"kappa", params.kappa},    {"horizon", params.horizon},
               {"paths", paths},           {"seed", seed ? seed : 1}};
        write_samples_csv(s, p.dump(), out.file("nba_samples.csv"));
        for (const auto& path : out.flush())
            std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_expstatic(const std::vector<double>& probs, const std::vector<double>& q,
                  double gamma, double tau, double kappa, const std::string& structure) {
    if (structure == "independent") {
        std::printf("p,u_star\n");
        for (double p : probs)
            std::printf("%s,%s\n", fmt(p).c_str(),
                        fmt(solve_exp_independent(p, gamma, tau * kappa)).c_str());
        return 0;
    }
    std::vector<double> book = q;
    if (book.empty()) book.assign(probs.size(), 0.0);
    auto sol = solve_exp_partition(probs, book, gamma, tau, kappa);
    std::printf("outcome,p,q,u_star\n");
    for (std::size_t i = 0; i < probs.size(); ++i)
        std::printf("%zu,%s,%s,%s\n", i + 1, fmt(probs[i]).c_str(), fmt(book[i]).c_str(),
                    fmt(sol.u[i]).c_str());
    std::fprintf(stderr, "residual=%s converged=%d unique=%d\n", fmt(sol.residual).c_str(),
                 int(sol.converged), int(sol.unique));
    if (!sol.converged)
        throw numerical_error("partition system did not converge to tolerance");
    return 0;
}

int cmd_expdyn(double p_hat, double gamma, double beta, double kappa, double horizon,
               double t, const std::vector<long>& q_in, const std::vector<long>& caps_in) {
    std::optional<BookVector> caps;
    if (!caps_in.empty()) caps = caps_in;
    ExpDynamicModel model(gamma, beta, kappa,
                          OutcomeStructure::partition({p_hat, 1.0 - p_hat}), horizon, caps);
    BookVector q = q_in.empty() ? BookVector{0, 0} : q_in;
    auto quote = model.optimal_quote(t, q);
    json j;
    j["u"] = quote.u;
    j["u_raw"] = quote.u_raw;
    j["active"] = std::vector<int>(quote.active.begin(), quote.active.end());
    j["clamped"] = std::vector<int>(quote.clamped.begin(), quote.clamped.end());
    j["margin"] = quote.u[0] + quote.u[1] - 1.0;
    j["log_G"] = model.log_G(t, q);
    j["H"] = std::exp(model.log_H(t, q));
    auto res = model.ode_residual(t, q);
    j["ode_residual"] = res.residual;
    j["ode_residual_relative"] = res.relative;
    j["ode_residual_bound"] = res.certified_bound;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_figures(const std::string& out_dir, std::size_t paths, std::uint64_t seed,
                unsigned threads) {
    OutputSet out(out_dir);

    {  // Optimal independent-case price as a function of the probability.
        auto& f = out.file("fig1_independent_price.csv");
        f << "# params: {\"gamma\":2,\"tau\":1,\"family\":\"ratio\"}\n";
        f << "p,u_star\n";
        for (int i = 1; i <= 99; ++i) {
            const double p = i / 100.0;
            f << fmt(p) << "," << fmt(solve_exp_independent(p, 2.0, 1.0)) << "\n";
        }
    }

    {  // Partition price surfaces over (p1, p2).
        auto& f = out.file("fig2_partition_surface.csv");
        f << "# params: {\"gamma\":2,\"tau\":5,\"q\":[0,0,0],\"family\":\"ratio\"}\n";
        f << "p1,p2,u1,u2,u3\n";
        for (int a = 1; a <= 9; ++a) {
            for (int b = 1; b <= 9; ++b) {
                const double p1 = a * 0.05, p2 = b * 0.05;
                auto sol = solve_exp_partition({p1, p2, 1.0 - p1 - p2}, {0.0, 0.0, 0.0},
                                               2.0, 5.0);
                f << fmt(p1) << "," << fmt(p2) << "," << fmt(sol.u[0]) << ","
                  << fmt(sol.u[1]) << "," << fmt(sol.u[2]) << "\n";
            }
        }
    }

    {  // Prices and worst-case settlement against the accumulated book.
        auto& f = out.file("fig3_inventory.csv");
        f << "# params: {\"p\":[0.5,0.333333,0.166667],\"gamma\":2,\"tau\":1,\"x\":0}\n";
        f << "q1,u1,u2,u3,worst_case_wealth\n";
        const std::vector<double> p{0.5, 1.0 / 3, 1.0 / 6};
        for (int i = 0; i <= 20; ++i) {
            const double q1 = 0.1 * i;
            auto sol = solve_exp_partition(p, {q1, 0.0, 0.0}, 2.0, 1.0);
            auto wealth = partition_settlement_profile(p, {q1, 0.0, 0.0}, sol.u, 1.0);
            const double worst = *std::min_element(wealth.begin(), wealth.end());
            f << fmt(q1) << "," << fmt(sol.u[0]) << "," << fmt(sol.u[1]) << ","
              << fmt(sol.u[2]) << "," << fmt(worst) << "\n";
        }
    }

    {  // One spread path with its conditional band probabilities.
        auto& f = out.file("fig4_spread_path.csv");
        f << "# params: {\"mu\":2.33,\"sigma\":10,\"thresholds\":[0,3],\"seed\":"
          << (seed ? seed : 1) << "}\n";
        f << "t,delta,p1,p2,p3\n";
        BrownianSpreadModel m{2.33, 10.0, 1.0, {0.0, 3.0}};
        BrownianSpreadModel::State st{0.0};
        Rng rng = Rng::substream(seed ? seed : 1, 0);
        const int steps = 500;
        for (int k = 0; k <= steps; ++k) {
            const double t = double(k) / steps;
            auto p = m.outcome_probs(st, t);
            f << fmt(t) << "," << fmt(st.delta) << "," << fmt(p[0]) << "," << fmt(p[1])
              << "," << fmt(p[2]) << "\n";
            if (k < steps) m.step(st, 1.0 / steps, rng);
        }
    }

    auto coin_quotes = [](double gamma, double beta, double p_hat, BookVector q,
                          double tau) {
        ExpDynamicModel model(gamma, beta, 1.0,
                              OutcomeStructure::partition({p_hat, 1.0 - p_hat}), tau);
        return model.optimal_quote(0.0, q);
    };

    {  // Price and value sensitivity to the demand decay beta.
        auto& f = out.file("fig5_beta.csv");
        f << "# params: {\"p\":0.6,\"gamma\":2,\"kappa\":1,\"tau\":1,\"q\":[0,0]}\n";
        f << "beta,u1,u2,H\n";
        for (int i = 0; i <= 30; ++i) {
            const double beta = 5.0 + 0.5 * i;
            auto quote = coin_quotes(2.0, beta, 0.6, {0, 0}, 1.0);
            ExpDynamicModel model(2.0, beta, 1.0, OutcomeStructure::partition({0.6, 0.4}),
                                  1.0);
            f << fmt(beta) << "," << fmt(quote.u[0]) << "," << fmt(quote.u[1]) << ","
              << fmt(std::exp(model.log_H(0.0, {0, 0}))) << "\n";
        }
    }

    {  // Prices against the remaining time.
        auto& f = out.file("fig5_horizon.csv");
        f << "# params: {\"p\":0.6,\"gamma\":2,\"beta\":10,\"kappa\":1,\"q\":[0,0]}\n";
        f << "tau,u1,u2,margin\n";
        for (int i = 1; i <= 40; ++i) {
            const double tau = 0.25 * i;
            auto quote = coin_quotes(2.0, 10.0, 0.6, {0, 0}, tau);
            f << fmt(tau) << "," << fmt(quote.u[0]) << "," << fmt(quote.u[1]) << ","
              << fmt(quote.u[0] + quote.u[1] - 1.0) << "\n";
        }
    }

    {  // Sensitivity to risk aversion, with the value at x = 1.
        auto& f = out.file("fig6_gamma.csv");
        f << "# params: {\"p\":0.6,\"beta\":10,\"kappa\":1,\"tau\":1,\"q\":[0,0],\"x\":1}\n";
        f << "gamma,u1,u2,V\n";
        for (int i = 0; i <= 30; ++i) {
            const double gamma = 1.0 + 0.1 * i;
            auto quote = coin_quotes(gamma, 10.0, 0.6, {0, 0}, 1.0);
            ExpDynamicModel model(gamma, 10.0, 1.0, OutcomeStructure::partition({0.6, 0.4}),
                                  1.0);
            const double V = -std::exp(-gamma * 1.0) * std::exp(model.log_H(0.0, {0, 0}));
            f << fmt(gamma) << "," << fmt(quote.u[0]) << "," << fmt(quote.u[1]) << ","
              << fmt(V) << "\n";
        }
    }

    {  // Sensitivity to the outcome probability and to the inventory.
        auto& f = out.file("fig7_probability.csv");
        f << "# params: {\"gamma\":2,\"beta\":10,\"kappa\":1,\"tau\":1,\"q\":[0,0]}\n";
        f << "p_hat,u1,u2\n";
        for (int i = 0; i <= 40; ++i) {
            const double p_hat = 0.3 + 0.01 * i;
            auto quote = coin_quotes(2.0, 10.0, p_hat, {0, 0}, 1.0);
            f << fmt(p_hat) << "," << fmt(quote.u[0]) << "," << fmt(quote.u[1]) << "\n";
        }
        auto& g = out.file("fig7_inventory.csv");
        g << "# params: {\"p\":0.6,\"gamma\":2,\"beta\":10,\"kappa\":1,\"tau\":1,\"q2\":5}\n";
        g << "q1,u1,u2\n";
        for (long q1 = 0; q1 <= 10; ++q1) {
            auto quote = coin_quotes(2.0, 10.0, 0.6, {q1, 5}, 1.0);
            g << q1 << "," << fmt(quote.u[0]) << "," << fmt(quote.u[1]) << "\n";
        }
    }

    {  // Spread-betting profit statistics.
        const std::size_t n = paths ? paths : 2000;
        auto s = nba_experiment({}, n, seed ? seed : 1, threads ? threads : 1);
        auto& f = out.file("table1_spread_profit.csv");
        f << "# params: {\"mu\":2.33,\"sigma\":10,\"kappa\":10000,\"T\":1,\"paths\":" << n
          << ",\"seed\":" << (seed ? seed : 1) << "}\n";
        f << "mean,sd,min,q25,median,q75,max\n";
        f << fmt(s.mean) << "," << fmt(s.sd) << "," << fmt(s.min) << "," << fmt(s.q25)
          << "," << fmt(s.median) << "," << fmt(s.q75) << "," << fmt(s.max) << "\n";
    }

    for (const auto& path : out.flush()) std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Betting-market pricing and simulation toolkit"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--out", flags.out_dir, "Output directory (default $BOOKMAKER_OUT or .)");
    app.add_option("--seed", flags.seed, "Master seed override");
    app.add_option("--paths", flags.paths, "Monte Carlo path count override");
    app.add_option("--dt", flags.dt, "Time step override");
    app.add_option("--threads", flags.threads, "Worker thread count");

    auto* price = app.add_subcommand("price", "Closed-form risk-neutral prices");
    std::string family = "ratio", method = "closed";
    std::vector<double> probs;
    double kappa = 1.0, beta = 10.0;
    price->add_option("--family", family, "ratio|logratio|exponential");
    price->add_option("--p", probs, "Outcome probabilities")->required()->delimiter(',');
    price->add_option("--kappa", kappa, "Intensity scale");
    price->add_option("--beta", beta, "Exponential-family decay");
    price->add_option("--method", method, "closed|pointwise|method3");

    auto* coin = app.add_subcommand("coin", "Coin-market profitability analytics");
    double coin_p = 0.5;
    std::vector<double> horizons{1.0, 2.0, 5.0, 10.0};
    std::size_t coin_mc = 0;
    coin->add_option("--p", coin_p, "P(Heads)");
    coin->add_option("--horizons", horizons, "Horizons to evaluate")->delimiter(',');
    coin->add_option("--mc-paths", coin_mc, "Add a Monte Carlo estimate with this many paths");

    auto* simulate = app.add_subcommand("simulate", "Config-driven market simulation");
    std::string config_path;
    bool samples = false;
    simulate->add_option("--config", config_path, "JSON configuration file")->required();
    simulate->add_flag("--samples", samples, "Write per-path samples.csv");

    auto* nba = app.add_subcommand("nba", "Spread-betting experiment");
    SpreadExperimentParams nba_params;
    bool nba_samples = false;
    nba->add_option("--mu", nba_params.mu, "Home-advantage drift");
    nba->add_option("--sigma", nba_params.sigma, "Spread volatility");
    nba->add_option("--kappa", nba_params.kappa, "Intensity scale");
    nba->add_option("--horizon", nba_params.horizon, "Game length");
    nba->add_flag("--samples", nba_samples, "Write per-path nba_samples.csv");

    auto* expstatic = app.add_subcommand("expstatic", "Static exponential-utility prices");
    std::vector<double> es_p, es_q;
    double es_gamma = 2.0, es_tau = 1.0, es_kappa = 1.0;
    std::string es_structure = "partition";
    expstatic->add_option("--p", es_p, "Outcome probabilities")->required()->delimiter(',');
    expstatic->add_option("--q", es_q, "Accumulated book")->delimiter(',');
    expstatic->add_option("--gamma", es_gamma, "Risk aversion");
    expstatic->add_option("--tau", es_tau, "Remaining horizon");
    expstatic->add_option("--kappa", es_kappa, "Intensity scale");
    expstatic->add_option("--structure", es_structure, "partition|independent");

    auto* expdyn = app.add_subcommand("expdyn", "Dynamic exponential-utility quotes");
    double ed_p = 0.6, ed_gamma = 2.0, ed_beta = 10.0, ed_kappa = 1.0, ed_T = 1.0,
           ed_t = 0.0;
    std::vector<long> ed_q, ed_caps;
    expdyn->add_option("--p", ed_p, "P(Heads)");
    expdyn->add_option("--gamma", ed_gamma, "Risk aversion");
    expdyn->add_option("--beta", ed_beta, "Demand decay");
    expdyn->add_option("--kappa", ed_kappa, "Intensity scale");
    expdyn->add_option("--horizon", ed_T, "Horizon");
    expdyn->add_option("--t", ed_t, "Evaluation time");
    expdyn->add_option("--q", ed_q, "Current book (two integers)")->delimiter(',');
    expdyn->add_option("--caps", ed_caps, "Per-outcome bet caps")->delimiter(',');

    auto* figures = app.add_subcommand("figures", "Regenerate every figure/table data file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return cmd_price(family, probs, kappa, beta, method);
        if (coin->parsed())
            return cmd_coin(coin_p, horizons, coin_mc, flags.seed, flags.threads);
        if (simulate->parsed()) return cmd_simulate(config_path, flags, samples);
        if (nba->parsed()) {
            if (flags.dt > 0.0) nba_params.dt = flags.dt;
            return cmd_nba(flags.paths ? flags.paths : 1000, flags.seed, nba_params,
                           flags.threads, flags.out_dir, nba_samples);
        }
        if (expstatic->parsed())
            return cmd_expstatic(es_p, es_q, es_gamma, es_tau, es_kappa, es_structure);
        if (expdyn->parsed())
            return cmd_expdyn(ed_p, ed_gamma, ed_beta, ed_kappa, ed_T, ed_t, ed_q, ed_caps);
        if (figures->parsed())
            return cmd_figures(flags.out_dir, flags.paths, flags.seed, flags.threads);
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
