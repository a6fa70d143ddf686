#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "discrank/errors.hpp"
#include "discrank/eval.hpp"
#include "discrank/games.hpp"
#include "discrank/payoff.hpp"

namespace discrank {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Reads a CSV with the exact `header`; returns the data rows.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in,
                                                      const std::vector<std::string>& header) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" + expected +
                         "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw ParseError("missing CSV header");
  return rows;
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size()) throw ParseError("cannot parse " + what + " '" + s + "'");
  return x;
}

}  // namespace detail

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// Match CSV: header `player_a,player_b,score_a`, score in {0, 0.5, 1}.
inline std::vector<MatchRecord> read_matches_csv(std::istream& in) {
  const auto rows = detail::read_csv(in, {"player_a", "player_b", "score_a"});
  std::vector<MatchRecord> records;
  records.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double s = detail::parse_double(rows[k][2], "score_a");
    if (s != 0.0 && s != 0.5 && s != 1.0) {
      throw InvalidRecord("record " + std::to_string(k + 1) + ": score_a must be 0, 0.5 or 1");
    }
    if (rows[k][0].empty() || rows[k][1].empty()) {
      throw InvalidRecord("record " + std::to_string(k + 1) + ": empty player id");
    }
    records.push_back({rows[k][0], rows[k][1], s});
  }
  return records;
}

inline void write_matches_csv(std::ostream& out, const std::vector<MatchRecord>& records) {
  out << "player_a,player_b,score_a\n";
  for (const auto& r : records) {
    out << detail::csv_field(r.player_a) << ',' << detail::csv_field(r.player_b) << ','
        << format_double(r.score_a) << '\n';
  }
}

/// Pairs CSV: header `player_a,player_b`.
inline std::vector<std::pair<std::string, std::string>> read_pairs_csv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& row : detail::read_csv(in, {"player_a", "player_b"})) {
    out.emplace_back(std::move(row[0]), std::move(row[1]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Payoff JSON

inline json payoff_to_json(const ObservedPayoff& obs) {
  json entries = json::array();
  for (const auto& e : obs.entries()) {
    entries.push_back({{"i", e.i}, {"j", e.j}, {"p", e.p}, {"count", e.count}});
  }
  return {{"players", obs.players()}, {"entries", std::move(entries)}};
}

inline ObservedPayoff payoff_from_json(const json& j) {
  try {
    std::vector<PayoffEntry> entries;
    for (const auto& e : j.at("entries")) {
      entries.push_back({e.at("i").get<std::size_t>(), e.at("j").get<std::size_t>(),
                         e.at("p").get<double>(), e.value("count", std::size_t{1})});
    }
    return ObservedPayoff(j.at("players").get<std::vector<std::string>>(), std::move(entries));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed payoff JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Model JSON

namespace detail {

inline json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_json(const json& j, std::size_t n, const char* what) {
  const auto xs = j.get<std::vector<double>>();
  if (xs.size() != n) {
    throw ParseError(std::string(what) + " has " + std::to_string(xs.size()) + " values for " +
                     std::to_string(n) + " players");
  }
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

}  // namespace detail

inline json model_to_json(const Model& model) {
  if (const auto* r = std::get_if<EloRating>(&model)) {
    return {{"model", r->model}, {"players", r->players}, {"u", detail::vector_to_json(r->u)}};
  }
  const auto& e = std::get<DiscEmbedding>(model);
  json comps = json::array();
  for (const auto& c : e.components) {
    comps.push_back({{"u", detail::vector_to_json(c.u)}, {"v", detail::vector_to_json(c.v)}});
  }
  json j = {{"model", e.model},
            {"loss_space", to_string(e.loss_space)},
            {"k", e.k()},
            {"players", e.players},
            {"components", std::move(comps)},
            {"ridge", e.ridge},
            {"seed", e.seed}};
  if (e.transitive_base.size() > 0) j["base"] = detail::vector_to_json(e.transitive_base);
  return j;
}

inline Model model_from_json(const json& j) {
  try {
    const auto name = j.at("model").get<std::string>();
    auto players = j.at("players").get<std::vector<std::string>>();
    const auto n = players.size();
    if (name == "elo" || name == "elopp") {
      Vector u = detail::vector_from_json(j.at("u"), n, "u");
      return EloRating{std::move(players), std::move(u), name};
    }
    if (name != "disc" && name != "melo" && name != "schur-prob") {
      throw ParseError("unknown model '" + name + "'");
    }
    DiscEmbedding e;
    e.model = name;
    e.players = std::move(players);
    e.loss_space = parse_loss_space(j.at("loss_space").get<std::string>());
    e.ridge = j.value("ridge", 0.0);
    e.seed = j.value("seed", std::uint64_t{0});
    for (const auto& c : j.at("components")) {
      e.components.push_back({detail::vector_from_json(c.at("u"), n, "u"),
                              detail::vector_from_json(c.at("v"), n, "v")});
    }
    if (j.contains("k") && j.at("k").get<std::size_t>() != e.components.size()) {
      throw ParseError("k does not match the number of components");
    }
    if (j.contains("base")) e.transitive_base = detail::vector_from_json(j.at("base"), n, "base");
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed model JSON: ") + ex.what());
  } catch (const InvalidConfig& ex) {
    throw ParseError(std::string("malformed model JSON: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------
// GameSpec JSON

inline json game_to_json(const GameSpec& spec) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, EloGame>) {
          return {{"game", "elo"}, {"u", detail::vector_to_json(g.u)}};
        } else if constexpr (std::is_same_v<T, DiscGame>) {
          return {{"game", "disc"},
                  {"u", detail::vector_to_json(g.u)},
                  {"v", detail::vector_to_json(g.v)}};
        } else if constexpr (std::is_same_v<T, Interpolated>) {
          return {{"game", "interp"},
                  {"ratio", g.ratio},
                  {"elo", game_to_json(*g.elo)},
                  {"disc", game_to_json(*g.disc)}};
        } else {
          return {{"game", "example3"}, {"gamma", g.gamma}, {"delta", g.delta}};
        }
      },
      spec.kind);
}

inline GameSpec game_from_json(const json& j) {
  try {
    const auto kind = j.at("game").get<std::string>();
    GameSpec spec;
    if (kind == "elo") {
      const auto u = j.at("u").get<std::vector<double>>();
      spec.kind = EloGame{detail::vector_from_json(j.at("u"), u.size(), "u")};
    } else if (kind == "disc") {
      const auto u = j.at("u").get<std::vector<double>>();
      spec.kind = DiscGame{detail::vector_from_json(j.at("u"), u.size(), "u"),
                           detail::vector_from_json(j.at("v"), u.size(), "v")};
    } else if (kind == "interp") {
      spec.kind = Interpolated{std::make_shared<const GameSpec>(game_from_json(j.at("elo"))),
                               std::make_shared<const GameSpec>(game_from_json(j.at("disc"))),
                               j.at("ratio").get<double>()};
    } else if (kind == "example3") {
      spec.kind = ExampleThree{j.at("gamma").get<double>(), j.at("delta").get<double>()};
    } else {
      throw ParseError("unknown game '" + kind + "'");
    }
    spec.validate();
    return spec;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed game JSON: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

/// Reads a payoff from Payoff JSON (".json") or a match CSV (anything else).
inline ObservedPayoff load_payoff(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return payoff_from_json(read_json_file(path));
  }
  std::istringstream in(read_file(path));
  return aggregate(read_matches_csv(in));
}

}  // namespace discrank
