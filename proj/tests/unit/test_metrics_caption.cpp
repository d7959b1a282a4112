#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "smot/error.hpp"
#include "smot/metrics.hpp"
#include "smot/text.hpp"

using namespace smot;

TEST_CASE("tokenize lower-cases and strips punctuation") {
  CHECK(tokenize("A man, in RED; waves.") == std::vector<std::string>{"a", "man", "in", "red", "waves"});
  CHECK(tokenize("  \t\n").empty());
  CHECK(tokenize("don't") == std::vector<std::string>{"dont"});
}

TEST_CASE("porter stemmer reference words") {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"}, {"ponies", "poni"},     {"cats", "cat"},         {"feed", "feed"},
      {"agreed", "agre"},     {"plastered", "plaster"}, {"motoring", "motor"}, {"sing", "sing"},
      {"conflated", "conflat"}, {"hopping", "hop"},   {"filing", "file"},      {"happy", "happi"},
      {"relational", "relat"}, {"generalization", "gener"}, {"running", "run"}, {"talks", "talk"},
      {"controll", "control"}, {"roll", "roll"},      {"probate", "probat"},   {"rate", "rate"},
      {"a", "a"},             {"is", "is"}};
  for (const auto& [word, stem] : cases) {
    CAPTURE(word);
    CHECK(porter_stem(word) == stem);
  }
}

TEST_CASE("self evaluation and disjoint tokens") {
  const std::string s = "a woman in a red coat waves to a man";
  const auto self = eval_caption({s}, s);
  CHECK(self.bleu == doctest::Approx(1.0));
  CHECK(self.rouge_l == doctest::Approx(1.0));
  CHECK(self.meteor > 0.99);

  const auto none = eval_caption({"the cat sleeps"}, "dogs bark loudly");
  CHECK(none.bleu == 0.0);
  CHECK(none.rouge_l == 0.0);
  CHECK(none.meteor == 0.0);
  CHECK(none.cider == 0.0);
}

TEST_CASE("rouge-l hand example") {
  CHECK(rouge_l({"a b c d f"}, "a b c d e") == doctest::Approx(0.8).epsilon(1e-12));
  // Max precision and max recall over references.
  CHECK(rouge_l({"x y", "a b c d f"}, "a b c d e") == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("bleu hand examples") {
  // All n-gram precisions 1, brevity penalty exp(1 - 6/4).
  const std::vector<CaptionSample> shorter{{{"a b c d e f"}, "a b c d"}};
  CHECK(bleu4(shorter) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  // Closest reference length decides the penalty.
  const std::vector<CaptionSample> closest{{{"a b c d e f g h", "a b c d x"}, "a b c d"}};
  CHECK(bleu4(closest) == doctest::Approx(std::exp(1.0 - 5.0 / 4.0)).epsilon(1e-12));
  // Orders without hypothesis n-grams are left out of the mean.
  const std::vector<CaptionSample> three{{{"a b c"}, "a b c"}};
  CHECK(bleu4(three) == doctest::Approx(1.0));
  // p1 = 3/4, p2 = 1/3, p3 = 0 -> 0.
  const std::vector<CaptionSample> partial{{{"a b c d"}, "a b x d"}};
  CHECK(bleu4(partial) == 0.0);
}

TEST_CASE("meteor hand examples") {
  // One chunk of three: penalty 0.5 * (1/3)^3.
  CHECK(meteor({"the cat sat"}, "the cat sat") == doctest::Approx(1.0 - 0.5 / 27.0).epsilon(1e-12));
  // Stem matches count.
  CHECK(meteor({"cat runs"}, "cats running") == doctest::Approx(1.0 - 0.5 / 8.0).epsilon(1e-12));
  // Fully reversed: four chunks of one.
  CHECK(meteor({"a b c d"}, "d c b a") == doctest::Approx(0.5).epsilon(1e-12));
  // P = 1/2, R = 1: Fmean = PR / (0.9 P + 0.1 R); one chunk of one.
  const double p = 0.5, r = 1.0;
  const double fmean = p * r / (0.9 * p + 0.1 * r);
  CHECK(meteor({"cat"}, "cat dog") == doctest::Approx(fmean * (1.0 - 0.5)).epsilon(1e-12));
}

TEST_CASE("cider matches the tf-idf oracle") {
  const std::vector<CaptionSample> toy{
      {{"a man walks a dog", "a person walks with a dog"}, "a man walks his dog"},
      {{"two women talk in a kitchen"}, "two women are talking"},
      {{"a child plays with a ball", "a kid kicks a ball"}, "a child kicks a red ball"}};
  const auto got = cider_scores(toy);
  const auto want = oracle::cider(toy);
  REQUIRE(got.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  CHECK(eval_caption_corpus(toy).cider == doctest::Approx((want[0] + want[1] + want[2]) / 3).epsilon(1e-9));
}

TEST_CASE("cider oracle agreement on random corpora") {
  testing::Gen g(31);
  std::vector<std::string> vocab;
  for (int i = 0; i < 12; ++i) vocab.push_back(g.word(2, 5));
  for (int run = 0; run < 30; ++run) {
    std::vector<CaptionSample> corpus;
    for (int i = g.integer(1, 6); i > 0; --i) {
      CaptionSample s;
      for (int k = g.integer(1, 3); k > 0; --k) s.refs.push_back(g.sentence(vocab, 1, 9));
      s.hyp = g.sentence(vocab, 1, 9);
      corpus.push_back(s);
    }
    const auto got = cider_scores(corpus);
    const auto want = oracle::cider(corpus);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("caption metrics ignore reference order and stay in range") {
  testing::Gen g(32);
  std::vector<std::string> vocab;
  for (int i = 0; i < 10; ++i) vocab.push_back(g.word(2, 6));
  for (int run = 0; run < 60; ++run) {
    std::vector<std::string> refs;
    for (int k = g.integer(1, 4); k > 0; --k) refs.push_back(g.sentence(vocab, 1, 10));
    const std::string hyp = g.sentence(vocab, 1, 10);
    auto shuffled = refs;
    std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
    const auto a = eval_caption(refs, hyp);
    const auto b = eval_caption(shuffled, hyp);
    CHECK(a.bleu == doctest::Approx(b.bleu).epsilon(1e-12));
    CHECK(a.meteor == doctest::Approx(b.meteor).epsilon(1e-12));
    CHECK(a.rouge_l == doctest::Approx(b.rouge_l).epsilon(1e-12));
    for (double v : {a.bleu, a.meteor, a.rouge_l}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("caption metric input errors") {
  CHECK_THROWS_AS(eval_caption({}, "a b"), UsageError);
  CHECK(eval_caption_corpus({}).bleu == 0.0);
}
