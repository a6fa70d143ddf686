#include <sstream>

#include <gtest/gtest.h>

#include "discrank/disc.hpp"
#include "discrank/games.hpp"
#include "discrank/io.hpp"

using namespace discrank;

TEST(MatchesCsv, RoundTrip) {
  const std::vector<MatchRecord> records = {
      {"alice", "bob", 1.0}, {"bob, jr", "alice", 0.5}, {"carol \"c\"", "bob", 0.0}};
  std::stringstream ss;
  write_matches_csv(ss, records);
  const auto back = read_matches_csv(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    EXPECT_EQ(back[k].player_a, records[k].player_a);
    EXPECT_EQ(back[k].player_b, records[k].player_b);
    EXPECT_EQ(back[k].score_a, records[k].score_a);
  }
}

TEST(MatchesCsv, ToleratesBomAndBlankLines) {
  std::istringstream in("\xEF\xBB\xBFplayer_a,player_b,score_a\n\na,b,1\r\n");
  const auto r = read_matches_csv(in);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].player_b, "b");
}

TEST(MatchesCsv, Errors) {
  std::istringstream wrong_header("a,b,c\nx,y,1\n");
  EXPECT_THROW(read_matches_csv(wrong_header), ParseError);
  std::istringstream bad_score("player_a,player_b,score_a\nx,y,0.3\n");
  EXPECT_THROW(read_matches_csv(bad_score), InvalidRecord);
  std::istringstream not_number("player_a,player_b,score_a\nx,y,win\n");
  EXPECT_THROW(read_matches_csv(not_number), ParseError);
  std::istringstream short_row("player_a,player_b,score_a\nx,y\n");
  try {
    read_matches_csv(short_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_matches_csv(empty), ParseError);
}

TEST(PairsCsv, Reads) {
  std::istringstream in("player_a,player_b\na,b\nc,a\n");
  const auto p = read_pairs_csv(in);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].first, "c");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.1");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(PayoffJson, RoundTrip) {
  const ObservedPayoff obs({"x", "y", "z"}, {{0, 1, 0.7, 2}, {2, 1, 0.25, 1}});
  const auto back = payoff_from_json(json::parse(payoff_to_json(obs).dump()));
  EXPECT_EQ(back.players(), obs.players());
  ASSERT_EQ(back.n_entries(), obs.n_entries());
  for (std::size_t k = 0; k < obs.n_entries(); ++k) {
    EXPECT_EQ(back.entries()[k].p, obs.entries()[k].p);
    EXPECT_EQ(back.entries()[k].count, obs.entries()[k].count);
  }
  EXPECT_THROW(payoff_from_json(json::parse(R"({"players":["a"]})")), ParseError);
}

TEST(ModelJson, EloRoundTrip) {
  EloRating r{{"a", "b"}, Vector(2), "elopp"};
  r.u << 0.25, -0.25;
  const auto j = model_to_json(Model{r});
  EXPECT_EQ(j.at("model"), "elopp");
  const auto back = std::get<EloRating>(model_from_json(json::parse(j.dump())));
  EXPECT_EQ(back.model, "elopp");
  EXPECT_EQ(back.u, r.u);
  EXPECT_EQ(back.players, r.players);
}

TEST(ModelJson, DiscRoundTrip) {
  const auto obs = to_observed(realize(interpolated_game(8, 0.5, 1)));
  FitConfig config;
  config.k = 2;
  config.loss_space = LossSpace::BceSigmoid;
  const auto fit = fit_melo(obs, [] {
    FitConfig c;
    return c;
  }());
  for (const auto& emb : {fit_disc(obs, config).embedding, fit.embedding}) {
    const auto j = model_to_json(Model{emb});
    const auto back = std::get<DiscEmbedding>(model_from_json(json::parse(j.dump())));
    EXPECT_EQ(back.model, emb.model);
    EXPECT_EQ(back.loss_space, emb.loss_space);
    EXPECT_EQ(back.k(), emb.k());
    EXPECT_EQ(back.transitive_base, emb.transitive_base);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t jj = 0; jj < 8; ++jj) {
        EXPECT_EQ(predict_disc(back, i, jj), predict_disc(emb, i, jj));
      }
    }
  }
}

TEST(ModelJson, Errors) {
  EXPECT_THROW(model_from_json(json::parse(R"({"model":"glicko"})")), ParseError);
  EXPECT_THROW(model_from_json(json::parse(R"({"model":"elo","players":["a","b"],"u":[1]})")),
               ParseError);
  EXPECT_THROW(model_from_json(json::parse(R"({"model":"disc","players":["a","b"]})")),
               ParseError);
}

TEST(GameJson, RoundTrip) {
  for (const auto& spec : {random_elo_game(5, 1), random_disc_game(5, 2),
                           interpolated_game(5, 0.3, 3), GameSpec{ExampleThree{0.6, 0.8}}}) {
    const auto back = game_from_json(json::parse(game_to_json(spec).dump()));
    EXPECT_EQ(realize(back).matrix, realize(spec).matrix);
  }
  EXPECT_THROW(game_from_json(json::parse(R"({"game":"chess"})")), ParseError);
}

TEST(LoadPayoff, ChessFixture) {
  const auto obs = load_payoff(DISCRANK_TEST_DATA "/chess_like_matches.csv");
  EXPECT_EQ(obs.n_players(), 20u);
  EXPECT_NO_THROW(obs.require_index("player01"));
  EXPECT_NO_THROW(obs.require_index("player20"));
  EXPECT_THROW(load_payoff(DISCRANK_TEST_DATA "/does_not_exist.csv"), Error);
}
