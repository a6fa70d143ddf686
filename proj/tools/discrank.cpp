// discrank: command-line front end.
//
// Exit codes: 0 success, 2 usage or input error, 3 convergence failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discrank/discrank.hpp"

namespace {

using namespace discrank;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value,
                           std::optional<std::uint64_t> config_value = std::nullopt) {
  if (opt->count() > 0) return flag_value;
  if (config_value) return *config_value;
  if (const char* env = std::getenv("DISCRANK_SEED")) {
    try {
      std::size_t used = 0;
      const auto s = std::stoull(env, &used);
      if (used == std::string(env).size()) return s;
    } catch (const std::exception&) {
    }
    throw InvalidConfig(std::string("DISCRANK_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string game;
  std::string spec_in;
  std::size_t n = 32;
  double ratio = 0.5;
  double gamma = 0.75;
  double delta = 0.75;
  std::uint64_t seed = 0;
  std::string out;
  std::string spec_out;
  CLI::Option* n_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

GameSpec build_game(const GenerateArgs& a, std::uint64_t seed) {
  const bool interp = a.game == "interp";
  const bool example3 = a.game == "example3";
  if (a.ratio_opt->count() > 0 && !interp) throw InvalidConfig("--ratio only applies to --game interp");
  if ((a.gamma_opt->count() > 0 || a.delta_opt->count() > 0) && !example3) {
    throw InvalidConfig("--gamma/--delta only apply to --game example3");
  }
  if (a.n_opt->count() > 0 && example3) throw InvalidConfig("example3 always has 3 players");
  if (a.game == "elo") return random_elo_game(a.n, seed);
  if (a.game == "disc") return random_disc_game(a.n, seed);
  if (a.game == "cyclic-disc") return canonical_cyclic_disc(a.n);
  if (interp) return interpolated_game(a.n, a.ratio, seed);
  return GameSpec{ExampleThree{a.gamma, a.delta}};
}

int run_generate(const GenerateArgs& a) {
  GameSpec spec;
  if (!a.spec_in.empty()) {
    if (!a.game.empty()) throw InvalidConfig("--spec and --game are mutually exclusive");
    spec = game_from_json(read_json_file(a.spec_in));
  } else {
    if (a.game.empty()) throw InvalidConfig("one of --game or --spec is required");
    spec = build_game(a, resolve_seed(a.seed_opt, a.seed));
  }
  const auto dense = realize(spec);
  emit(a.out, dump(payoff_to_json(to_observed(dense))));
  if (!a.spec_out.empty()) write_file(a.spec_out, dump(game_to_json(spec)));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  std::string model = "disc";
  std::size_t k = 1;
  std::string loss;
  double ridge = 0.0;
  std::vector<double> cv_ridge;
  std::size_t cv_folds = 5;
  std::size_t min_games = 1;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t max_outer = 0;
  std::size_t max_inner = 0;
  double penalty_weight = 0.0;
  double tol = 0.0;
  std::string out;
  std::string report;
  std::string config;
  bool timing = false;
  CLI::App* app = nullptr;
};

bool given(const CLI::App* app, const std::string& name) { return app->count(name) > 0; }

/// Applies a JSON config file to options that were not given on the command line.
void apply_config(FitArgs& a, std::optional<std::uint64_t>& seed, FitConfig& fc) {
  if (a.config.empty()) return;
  const auto j = read_json_file(a.config);
  if (!j.is_object()) throw ParseError("config file must hold a JSON object");
  static const std::set<std::string> known = {
      "model",     "k",         "loss",       "loss_space",     "ridge",    "tol",
      "outer_tol", "max_outer", "max_inner",  "penalty_weight", "tol_orth", "clip_eps",
      "seed",      "min_games", "test_fraction", "weight_by_count", "cv_ridge", "cv_folds"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidConfig("unknown config key '" + key + "'");
  }
  try {
    auto pick = [&](const char* key, const char* flag, auto& dst) {
      if (j.contains(key) && !given(a.app, flag)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    pick("model", "--model", a.model);
    pick("k", "--k", a.k);
    pick("loss", "--loss", a.loss);
    pick("loss_space", "--loss", a.loss);
    pick("ridge", "--ridge", a.ridge);
    pick("cv_ridge", "--cv-ridge", a.cv_ridge);
    pick("cv_folds", "--cv-folds", a.cv_folds);
    pick("min_games", "--min-games", a.min_games);
    pick("test_fraction", "--test-fraction", a.test_fraction);
    pick("max_outer", "--max-outer", a.max_outer);
    pick("max_inner", "--max-inner", a.max_inner);
    pick("penalty_weight", "--penalty-weight", a.penalty_weight);
    pick("tol", "--tol", a.tol);
    if (j.contains("outer_tol")) fc.outer_tol = j.at("outer_tol").get<double>();
    if (j.contains("tol_orth")) fc.tol_orth = j.at("tol_orth").get<double>();
    if (j.contains("clip_eps")) fc.clip_eps = j.at("clip_eps").get<double>();
    if (j.contains("weight_by_count")) fc.weight_by_count = j.at("weight_by_count").get<bool>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad config value: ") + e.what());
  }
}

ModelSpec build_model_spec(const FitArgs& a, FitConfig fc) {
  const auto kind = parse_model_kind(a.model);
  ModelSpec spec = make_model_spec(kind, a.k);
  fc.k = a.k;
  fc.loss_space = spec.config.loss_space;
  if (!a.loss.empty()) {
    if (spec.is_elo()) {
      if (a.loss == "bce" || a.loss == "bce-sigmoid") {
        spec.elo.loss = EloLoss::Bce;
      } else if (a.loss == "quadratic") {
        spec.elo.loss = EloLoss::Quadratic;
      } else {
        throw InvalidConfig("Elo models take --loss bce or quadratic");
      }
    } else {
      fc.loss_space = parse_loss_space(a.loss);
    }
  }
  fc.ridge_weight = a.ridge;
  if (a.max_outer > 0) fc.max_outer = a.max_outer;
  if (a.max_inner > 0) fc.max_inner = a.max_inner;
  if (a.penalty_weight > 0.0) fc.penalty_weight = a.penalty_weight;
  if (a.tol > 0.0) {
    fc.tol = a.tol;
    spec.elo.tol = a.tol;
  }
  if (a.max_outer > 0) spec.elo.max_iter = a.max_outer;
  spec.elo.weight_by_count = fc.weight_by_count;
  spec.config = fc;
  if (spec.is_elo() && (given(a.app, "--k") || a.ridge != 0.0 || !a.cv_ridge.empty())) {
    throw InvalidConfig("--k, --ridge and --cv-ridge do not apply to Elo models");
  }
  spec.validate();
  return spec;
}

int run_fit(FitArgs& a, const CLI::Option* seed_opt) {
  FitConfig fc;
  std::optional<std::uint64_t> config_seed;
  apply_config(a, config_seed, fc);
  fc.seed = resolve_seed(seed_opt, a.seed, config_seed);
  if (!(a.test_fraction >= 0.0 && a.test_fraction < 1.0)) {
    throw InvalidConfig("--test-fraction must lie in [0, 1)");
  }
  if (a.min_games < 1) throw InvalidConfig("--min-games must be >= 1");
  auto spec = build_model_spec(a, fc);

  auto obs = load_payoff(a.input);
  if (a.min_games > 1) obs = filter_min_count(obs, a.min_games);
  std::optional<TrainTest> parts;
  if (a.test_fraction > 0.0) parts = split(obs, {a.test_fraction, spec.config.seed});
  const ObservedPayoff& train = parts ? parts->train : obs;

  if (!a.cv_ridge.empty()) {
    spec.config.ridge_weight =
        cross_validate_ridge(train, spec.config, a.cv_ridge, a.cv_folds);
  }
  auto fitted = fit_model_lenient(spec, train);
  auto& report = fitted.report;
  report.train_mse = mse(fitted.model, train);
  if (parts) report.test_mse = mse(fitted.model, parts->test);
  report.config["test_fraction"] = a.test_fraction;
  report.config["min_games"] = a.min_games;
  report.config["n_players"] = obs.n_players();
  report.config["n_train"] = train.n_entries();
  report.config["n_test"] = parts ? parts->test.n_entries() : 0;
  if (!a.cv_ridge.empty()) {
    report.config["cv_ridge"] = a.cv_ridge;
    report.config["cv_folds"] = a.cv_folds;
    report.config["ridge"] = spec.config.ridge_weight;
  }

  emit(a.out, dump(model_to_json(fitted.model)));
  if (!a.report.empty()) write_file(a.report, dump(to_json(report, a.timing)));
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.converged) {
    std::cerr << "error: " << report.model << " fit did not converge\n";
    return kExitConvergence;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify, predict, export-embedding

const DiscEmbedding& require_disc(const Model& model) {
  const auto* e = std::get_if<DiscEmbedding>(&model);
  if (e == nullptr) throw InvalidConfig("Elo models have no disc components to inspect");
  return *e;
}

int run_classify(const std::string& model_path, double perturb_eps) {
  const auto model = model_from_json(read_json_file(model_path));
  const auto& emb = require_disc(model);
  const auto c = classify_main_component(emb, perturb_eps);
  std::ostringstream out;
  out << "verdict: " << to_string(c.verdict) << "\n";
  out << "origin: " << to_string(c.origin_location) << "\n";
  if (c.witness) {
    out << "witness: " << emb.players[c.witness->i] << " > " << emb.players[c.witness->j]
        << " > " << emb.players[c.witness->k] << " > " << emb.players[c.witness->i] << "\n";
  }
  std::cout << out.str();
  return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& pairs_path,
                const std::string& out_path) {
  const auto model = model_from_json(read_json_file(model_path));
  std::istringstream in(read_file(pairs_path));
  const auto pairs = read_pairs_csv(in);
  const auto& players = model_players(model);
  std::set<std::string> known(players.begin(), players.end());
  std::vector<std::string> unknown;
  for (const auto& [a, b] : pairs) {
    for (const auto* name : {&a, &b}) {
      if (!known.count(*name) &&
          std::find(unknown.begin(), unknown.end(), *name) == unknown.end()) {
        unknown.push_back(*name);
      }
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown player(s):";
    for (const auto& u : unknown) msg += " " + u;
    throw UnknownPlayer(msg);
  }
  std::ostringstream out;
  out << "player_a,player_b,p_hat\n";
  for (const auto& [a, b] : pairs) {
    out << detail::csv_field(a) << ',' << detail::csv_field(b) << ','
        << format_double(predict(model, a, b)) << '\n';
  }
  emit(out_path, out.str());
  return kExitOk;
}

int run_export(const std::string& model_path, std::size_t component, const std::string& out_path) {
  const auto model = model_from_json(read_json_file(model_path));
  const auto& emb = require_disc(model);
  if (component < 1 || component > emb.k()) {
    throw InvalidConfig("--component must lie in [1, " + std::to_string(emb.k()) + "]");
  }
  auto c = emb.components[component - 1];
  canonicalize(c);
  std::ostringstream out;
  out << "player,u,v\n";
  for (std::size_t i = 0; i < emb.n_players(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << detail::csv_field(emb.players[i]) << ',' << format_double(c.u[k]) << ','
        << format_double(c.v[k]) << '\n';
  }
  emit(out_path, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
  std::vector<std::string> games = {"elo", "disc", "interp:0.25", "interp:0.5", "interp:0.75"};
  std::vector<std::string> inputs;
  std::vector<std::string> models = {"elo", "elopp", "disc:1", "melo:1", "disc:2"};
  std::size_t n = 32;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double test_fraction = 0.2;
  std::size_t threads = 1;
  std::string out;
  std::string json_out;
  bool timing = false;
};

GameSpec benchmark_game(const std::string& name, std::size_t n, std::uint64_t seed) {
  const auto colon = name.find(':');
  const auto kind = name.substr(0, colon);
  if (kind == "interp") {
    if (colon == std::string::npos) throw InvalidConfig("interp games are written interp:<ratio>");
    return interpolated_game(n, detail::parse_double(name.substr(colon + 1), "ratio"), seed);
  }
  if (colon != std::string::npos) throw InvalidConfig("unexpected ':' in game '" + name + "'");
  if (kind == "elo") return random_elo_game(n, seed);
  if (kind == "disc") return random_disc_game(n, seed);
  if (kind == "cyclic-disc") return canonical_cyclic_disc(n);
  throw InvalidConfig("unknown benchmark game '" + name + "'");
}

ModelSpec parse_benchmark_model(const std::string& s) {
  const auto colon = s.find(':');
  const auto kind = parse_model_kind(s.substr(0, colon));
  std::size_t k = 1;
  if (colon != std::string::npos) {
    const double x = detail::parse_double(s.substr(colon + 1), "k");
    if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x))) {
      throw InvalidConfig("bad component count in '" + s + "'");
    }
    k = static_cast<std::size_t>(x);
  }
  auto spec = make_model_spec(kind, k);
  if (spec.is_elo() && colon != std::string::npos) {
    throw InvalidConfig("Elo models take no component count: '" + s + "'");
  }
  return spec;
}

std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int run_benchmark(BenchmarkArgs& a, const CLI::Option* seed_opt, std::uint64_t seed_flag) {
  if (a.n < 3) throw InvalidConfig("--n must be >= 3");
  if (a.seeds.empty()) a.seeds = {resolve_seed(seed_opt, seed_flag)};
  std::vector<ModelSpec> models;
  for (const auto& m : a.models) models.push_back(parse_benchmark_model(m));
  for (auto& m : models) m.validate();

  std::vector<BenchmarkGame> games;
  for (const auto& name : a.games) {
    for (auto s : a.seeds) {
      games.push_back({name, s, to_observed(realize(benchmark_game(name, a.n, s)))});
    }
  }
  for (const auto& path : a.inputs) {
    const auto obs = load_payoff(path);
    for (auto s : a.seeds) games.push_back({path, s, obs});
  }
  const auto rows = benchmark(games, models, {a.test_fraction, 0, a.threads});
  const auto means = benchmark_means(rows);

  std::ostringstream csv;
  csv << "game,model,params,train_mse,test_mse,elo_ratio,seed\n";
  for (const auto& r : rows) {
    csv << detail::csv_field(r.game) << ',' << r.model << ',' << r.params << ','
        << fmt(r.train_mse) << ',' << fmt(r.test_mse) << ',' << fmt(r.elo_ratio) << ',' << r.seed
        << '\n';
  }
  for (const auto& m : means) {
    csv << detail::csv_field(m.game) << ',' << m.model << ',' << m.params << ','
        << fmt(m.train_mse) << ',' << fmt(m.test_mse) << ',' << fmt(m.elo_ratio) << ",mean\n";
  }
  emit(a.out, csv.str());

  bool converged = true;
  json jrows = json::array();
  for (const auto& r : rows) {
    converged = converged && r.report.converged;
    jrows.push_back({{"game", r.game},
                     {"model", r.model},
                     {"params", r.params},
                     {"train_mse", finite_or_null(r.train_mse)},
                     {"test_mse", finite_or_null(r.test_mse)},
                     {"elo_ratio", finite_or_null(r.elo_ratio)},
                     {"seed", r.seed},
                     {"report", to_json(r.report, a.timing)}});
  }
  if (!a.json_out.empty()) {
    json jmeans = json::array();
    for (const auto& m : means) {
      jmeans.push_back({{"game", m.game},
                        {"model", m.model},
                        {"params", m.params},
                        {"train_mse", finite_or_null(m.train_mse)},
                        {"test_mse", finite_or_null(m.test_mse)},
                        {"elo_ratio", finite_or_null(m.elo_ratio)},
                        {"seeds", m.seeds}});
    }
    write_file(a.json_out, dump({{"n", a.n},
                                 {"test_fraction", a.test_fraction},
                                 {"rows", std::move(jrows)},
                                 {"means", std::move(jmeans)}}));
  }
  if (!converged) {
    std::cerr << "error: some benchmark fits did not converge (see the JSON reports)\n";
    return kExitConvergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elo and disc-decomposition ratings for symmetric zero-sum games"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const std::string seed_help = "Random seed (default: $DISCRANK_SEED, else 0)";

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write the payoff of a synthetic game as JSON");
  generate->add_option("--game", gen.game, "Game family")
      ->check(CLI::IsMember({"elo", "disc", "cyclic-disc", "interp", "example3"}));
  generate->add_option("--spec", gen.spec_in, "Realize a GameSpec JSON file instead of --game")
      ->check(CLI::ExistingFile);
  gen.n_opt = generate->add_option("--n", gen.n, "Number of players")
                  ->capture_default_str()
                  ->check(CLI::Range(2, 100000));
  gen.ratio_opt = generate->add_option("--ratio", gen.ratio, "Elo weight of an interp game")
                      ->capture_default_str()
                      ->check(CLI::Range(0.0, 1.0));
  gen.gamma_opt = generate->add_option("--gamma", gen.gamma, "example3 P_12 = P_13")->capture_default_str();
  gen.delta_opt = generate->add_option("--delta", gen.delta, "example3 P_23")->capture_default_str();
  gen.seed_opt = generate->add_option("--seed", gen.seed, seed_help);
  generate->add_option("--out", gen.out, "Payoff JSON output (default stdout)");
  generate->add_option("--spec-out", gen.spec_out, "Also write the GameSpec JSON here");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a rating model to a match CSV or payoff JSON");
  fit.app = fit_cmd;
  fit_cmd->add_option("--input", fit.input, "Match CSV (player_a,player_b,score_a) or payoff JSON")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--model", fit.model, "Model")
      ->capture_default_str()
      ->check(CLI::IsMember({"elo", "elopp", "disc", "melo", "schur-prob"}));
  fit_cmd->add_option("--k", fit.k, "Number of disc components")->capture_default_str();
  fit_cmd->add_option("--loss", fit.loss,
                      "Loss: bce-sigmoid|logit-mse (disc), prob-mse (melo, schur-prob), "
                      "bce (elo), quadratic (elopp)");
  fit_cmd->add_option("--ridge", fit.ridge, "Ridge weight on the first consistency vector")
      ->capture_default_str();
  fit_cmd->add_option("--cv-ridge", fit.cv_ridge, "Comma-separated ridge grid chosen by CV")
      ->delimiter(',');
  fit_cmd->add_option("--cv-folds", fit.cv_folds, "Folds for --cv-ridge")->capture_default_str();
  fit_cmd->add_option("--min-games", fit.min_games, "Drop pairs with fewer games")
      ->capture_default_str();
  fit_cmd->add_option("--test-fraction", fit.test_fraction,
                      "Fraction of pairs hidden for testing (0 disables)")
      ->capture_default_str();
  auto* fit_seed = fit_cmd->add_option("--seed", fit.seed, seed_help);
  fit_cmd->add_option("--max-outer", fit.max_outer, "Alternation budget per component");
  fit_cmd->add_option("--max-inner", fit.max_inner, "Inner quasi-Newton iteration budget");
  fit_cmd->add_option("--penalty-weight", fit.penalty_weight, "Initial orthogonality penalty weight");
  fit_cmd->add_option("--tol", fit.tol, "Inner gradient tolerance");
  fit_cmd->add_option("--config", fit.config, "JSON file with defaults for the flags above")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit.out, "Model JSON output (default stdout)");
  fit_cmd->add_option("--report", fit.report, "FitReport JSON output");
  fit_cmd->add_flag("--timing", fit.timing, "Include wall time in the report");

  std::string classify_model;
  double perturb_eps = 1e-6;
  auto* classify = app.add_subcommand("classify", "Transitive/cyclic verdict of the main component");
  classify->add_option("--model", classify_model, "Model JSON")->required()->check(CLI::ExistingFile);
  classify->add_option("--perturb-eps", perturb_eps, "Perturbation for origin-on-border cases")
      ->capture_default_str();

  std::string predict_model;
  std::string pairs;
  std::string predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "Win probabilities for listed pairs");
  predict_cmd->add_option("--model", predict_model, "Model JSON")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--pairs", pairs, "CSV with header player_a,player_b")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_out, "CSV output (default stdout)");

  std::string export_model;
  std::size_t component = 1;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export-embedding", "Write (player, u, v) of one component");
  export_cmd->add_option("--model", export_model, "Model JSON")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--component", component, "1-based component index")->capture_default_str();
  export_cmd->add_option("--out", export_out, "CSV output (default stdout)");

  BenchmarkArgs bench;
  std::uint64_t bench_seed = 0;
  auto* bench_cmd = app.add_subcommand("benchmark", "Compare models against Elo on held-out pairs");
  bench_cmd->add_option("--games", bench.games, "elo, disc, cyclic-disc, interp:<ratio>")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--input", bench.inputs, "Payoff JSON or match CSV files to add")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--models", bench.models, "Models as name or name:k")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "Players per synthetic game")->capture_default_str();
  auto* seeds_opt = bench_cmd->add_option("--seeds", bench.seeds, "Comma-separated seeds")
                        ->delimiter(',')
                        ->capture_default_str();
  auto* bench_seed_opt = bench_cmd->add_option("--seed", bench_seed, "Single seed; " + seed_help);
  seeds_opt->excludes(bench_seed_opt);
  bench_cmd->add_option("--test-fraction", bench.test_fraction, "Hidden fraction")
      ->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV output (default stdout)");
  bench_cmd->add_option("--json", bench.json_out, "JSON output");
  bench_cmd->add_flag("--timing", bench.timing, "Include wall times in the JSON reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*fit_cmd) return run_fit(fit, fit_seed);
    if (*classify) return run_classify(classify_model, perturb_eps);
    if (*predict_cmd) return run_predict(predict_model, pairs, predict_out);
    if (*export_cmd) return run_export(export_model, component, export_out);
    if (*bench_cmd) {
      if (seeds_opt->count() == 0 && (bench_seed_opt->count() > 0 || std::getenv("DISCRANK_SEED"))) {
        bench.seeds.clear();
      }
      return run_benchmark(bench, bench_seed_opt, bench_seed);
    }
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const discrank::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
