#include <doctest.h>

#include <limits>

#include "labeldist/errors.hpp"
#include "labeldist/labels.hpp"

using namespace labeldist;

TEST_CASE("canonical label order and letters") {
  CHECK(static_cast<int>(Label::Entailment) == 0);
  CHECK(static_cast<int>(Label::Neutral) == 1);
  CHECK(static_cast<int>(Label::Contradiction) == 2);
  CHECK(label_letter(Label::Entailment) == 'e');
  CHECK(label_letter(Label::Neutral) == 'n');
  CHECK(label_letter(Label::Contradiction) == 'c');
  CHECK(label_from_letter("e") == Label::Entailment);
  CHECK(label_from_letter("n") == Label::Neutral);
  CHECK(label_from_letter("c") == Label::Contradiction);
  CHECK_THROWS_AS(label_from_letter("x"), InputError);
  CHECK_THROWS_AS(label_from_letter(""), InputError);
  CHECK(label_name(Label::Entailment) == "entailment");
  CHECK(label_name(Label::Contradiction) == "contradiction");
}

TEST_CASE("distribution validation") {
  LabelDistribution ok{{0.2, 0.5, 0.3}};
  CHECK(is_valid_distribution(ok));
  CHECK_NOTHROW(validate_distribution(ok, "test"));

  LabelDistribution off_by_tiny{{0.2, 0.5, 0.3 + 5e-10}};
  CHECK(is_valid_distribution(off_by_tiny));  // inside the 1e-9 budget

  LabelDistribution off{{0.2, 0.5, 0.31}};
  CHECK_FALSE(is_valid_distribution(off));
  CHECK_THROWS_AS(validate_distribution(off, "test"), InputError);

  LabelDistribution negative{{-0.1, 0.6, 0.5}};
  CHECK_FALSE(is_valid_distribution(negative));

  LabelDistribution nan_dist{{0.2, 0.5, std::numeric_limits<double>::quiet_NaN()}};
  CHECK_FALSE(is_valid_distribution(nan_dist));
}

TEST_CASE("argmax ties break to the lowest canonical index") {
  CHECK(argmax_label(LabelDistribution{{0.4, 0.4, 0.2}}) == Label::Entailment);
  CHECK(argmax_label(LabelDistribution{{0.2, 0.4, 0.4}}) == Label::Neutral);
  CHECK(argmax_label(LabelDistribution{{1.0 / 3, 1.0 / 3, 1.0 / 3}}) == Label::Entailment);
  CHECK(argmax_index(LabelDistribution{{0.1, 0.2, 0.7}}) == 2);

  LabelCounts tie;
  tie[0] = 2;
  tie[1] = 2;
  tie[2] = 1;
  CHECK(argmax_label(tie) == Label::Entailment);
  LabelCounts tie2;
  tie2[1] = 3;
  tie2[2] = 3;
  CHECK(argmax_label(tie2) == Label::Neutral);
}

TEST_CASE("one_hot and uniform") {
  const LabelDistribution e = one_hot(Label::Entailment);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == 0.0);
  CHECK(e[2] == 0.0);
  const LabelDistribution u = uniform_distribution();
  CHECK(u[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(is_valid_distribution(u));
}

TEST_CASE("LabelCounts totals") {
  LabelCounts c;
  c[Label::Entailment] = 3;
  c[Label::Neutral] = 1;
  c[Label::Contradiction] = 1;
  CHECK(c.total() == 5);
}
