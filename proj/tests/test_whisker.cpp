#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wedge/whisker.hpp"

using namespace wedge;

namespace {

WedgeConfig integers() { return {}; }

ConvergentTail escaping_tail() {
  // member i = limit, coefficient at summand i, escape depth i
  ConvergentTail t;
  t.limit = Expr::empty();
  t.summand = {1, 1};
  t.escape = {1, 1};
  t.coeffs = {RecipeKind::Const, {Elem{1, 0}}};
  return t;
}

ConvergentTail powers_tail() {
  // member i = g_1^i at summand 1 with J(i) = 0: the canonical non-escaping
  // sequence
  ConvergentTail t;
  t.limit = Expr::empty();
  t.summand = {1, 0};
  t.escape = {0, 0};
  MemberRule m;
  m.pos = {1, 0};
  m.recipe = {RecipeKind::Pow, {Elem{1, 0}}};
  t.members = m;
  t.coeffs = {RecipeKind::Const, {Elem{1, 0}}};
  return t;
}

ThetaElement make_element(std::vector<IsolatedEntry> iso, std::vector<ConvergentTail> tails) {
  ThetaElement el;
  el.config_ref = "test";
  el.level = 8;
  el.support.isolated = std::move(iso);
  el.support.tails = std::move(tails);
  return el;
}

}  // namespace

TEST_CASE("fiber neighborhood membership") {
  WedgeConfig zz = integers();

  Expr alpha = parse_expr("( 2:1 omega[diag 5 1 const 1] )", zz);
  NbhdVerdict self = in_nbhd(alpha, {alpha, 4}, 10, zz);
  CHECK(self.kind == NbhdVerdict::Yes);

  NbhdVerdict low = in_nbhd(parse_expr("1:1", zz), {Expr::empty(), 1}, 10, zz);
  CHECK(low.kind == NbhdVerdict::No);
  CHECK(low.level == 1);

  NbhdVerdict high = in_nbhd(parse_expr("7:1", zz), {Expr::empty(), 3}, 10, zz);
  CHECK(high.kind == NbhdVerdict::Yes);

  // conjugates project trivially at low levels but are not tail words
  NbhdVerdict conj = in_nbhd(parse_expr("( 1:1 7:1 1:-1 )", zz), {Expr::empty(), 1}, 10, zz);
  CHECK(conj.kind == NbhdVerdict::No);
  CHECK(conj.level == 7);

  // a low cancelling pair around a block that only starts beyond the checked
  // bound: clean so far, but nothing certifies the letters stay hidden
  NbhdVerdict open_case =
      in_nbhd(parse_expr("( 1:1 omega[diag 50 1 const 1] 1:-1 )", zz), {Expr::empty(), 1}, 10, zz);
  CHECK(open_case.kind == NbhdVerdict::Inconclusive);
}

TEST_CASE("neighborhood membership is monotone in the depth") {
  WedgeConfig zz = integers();
  oracle::Rng rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    Expr base = oracle::random_expr(rng, zz, 5, 3);
    Expr cand = oracle::random_expr(rng, zz, 8, 4);
    int J = rng.pick(0, 6);
    int J2 = J + rng.pick(0, 3);
    NbhdVerdict narrow = in_nbhd(cand, {base, J2}, 12, zz);
    NbhdVerdict wide = in_nbhd(cand, {base, J}, 12, zz);
    if (narrow.kind == NbhdVerdict::Yes) CHECK(wide.kind != NbhdVerdict::No);
  }
}

TEST_CASE("check_convergence pinpoints the first failure") {
  WedgeConfig zz = integers();

  // rep_i = limit * (i+2 : 1) with J(i) = i+1
  ConvergentTail good;
  good.limit = Expr::empty();
  good.summand = {1, 1};
  good.escape = {2, 1};
  MemberRule m;
  m.pos = {3, 1};
  m.recipe = {RecipeKind::Const, {Elem{1, 0}}};
  good.members = m;
  good.coeffs = {RecipeKind::Const, {Elem{1, 0}}};
  CHECK(check_convergence(good, 20, zz).ok);

  // a letter that stays at level 2 against J(i) = i
  ConvergentTail stuck = good;
  stuck.escape = {1, 1};
  stuck.members->pos = {2, 0};
  ConvergenceReport rep = check_convergence(stuck, 20, zz);
  CHECK_FALSE(rep.ok);
  CHECK(rep.failed_at == 2);

  ConvergentTail bare = escaping_tail();
  CHECK(check_convergence(bare, 5, zz).ok);
}

TEST_CASE("image predicate: isolated supports, escaping and stuck tails") {
  WedgeConfig zz = integers();

  std::vector<IsolatedEntry> iso;
  for (int j = 1; j <= 5; ++j)
    iso.push_back({j, parse_expr(std::to_string(j + 1) + ":1", zz), Elem{1, 0}});
  ThetaVerdict finite = in_theta_image(make_element(iso, {}), 8, zz);
  CHECK(finite.kind == ThetaVerdict::InImage);

  // one empty-word representative per summand, escaping by construction
  ThetaVerdict diag = in_theta_image(make_element({}, {escaping_tail()}), 8, zz);
  CHECK(diag.kind == ThetaVerdict::InImage);

  // powers of a fixed letter never leave level 1
  ThetaVerdict powers = in_theta_image(make_element({}, {powers_tail()}), 8, zz);
  CHECK(powers.kind == ThetaVerdict::NotInImage);
  CHECK(powers.witness.find("non-escaping tail 1") != std::string::npos);

  // escaping members over a constant summand still overload that summand
  ConvergentTail crowded = escaping_tail();
  crowded.summand = {3, 0};
  ThetaVerdict crowd = in_theta_image(make_element({}, {crowded}), 8, zz);
  CHECK(crowd.kind == ThetaVerdict::NotInImage);
  CHECK(crowd.witness.find("unbounded support at summand 3") != std::string::npos);
}

TEST_CASE("image verdicts match truncation brute force") {
  WedgeConfig zz = integers();
  oracle::Rng rng(67);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<ConvergentTail> tails;
    int ntails = rng.pick(1, 2);
    for (int t = 0; t < ntails; ++t) {
      if (rng.chance(0.5)) {
        tails.push_back(escaping_tail());
      } else if (rng.chance(0.5)) {
        tails.push_back(powers_tail());
      } else {
        ConvergentTail tail = escaping_tail();
        tail.summand = {rng.pick(1, 4), 0};
        tails.push_back(tail);
      }
      // distinct limits keep the support description duplicate-free
      tails.back().limit = Expr::literal({20 + t, Elem{1, 0}});
    }
    std::vector<IsolatedEntry> iso;
    for (int i = rng.pick(0, 3); i > 0; --i)
      iso.push_back({rng.pick(1, 3) + 10 * i,
                     parse_expr(std::to_string(rng.pick(5, 9)) + ":1", zz), Elem{1, 0}});
    ThetaElement el = make_element(iso, tails);
    ThetaVerdict verdict = in_theta_image(el, 8, zz);
    bool brute = oracle::brute_force_in_image(el, 8, 40, zz);
    CHECK((verdict.kind == ThetaVerdict::InImage) == brute);
  }
}

TEST_CASE("malformed supports are rejected") {
  WedgeConfig zz = integers();

  // representative terminating in its own summand
  std::vector<IsolatedEntry> bad_rep = {{2, parse_expr("2:1", zz), Elem{1, 0}}};
  CHECK_THROWS_AS(in_theta_image(make_element(bad_rep, {}), 8, zz), Error);

  // zero coefficient
  std::vector<IsolatedEntry> zero = {{2, parse_expr("3:1", zz), Elem{0, 0}}};
  CHECK_THROWS_AS(in_theta_image(make_element(zero, {}), 8, zz), Error);

  // duplicate entries
  std::vector<IsolatedEntry> dup = {{2, parse_expr("3:1", zz), Elem{1, 0}},
                                    {2, parse_expr("3:1", zz), Elem{2, 0}}};
  CHECK_THROWS_AS(in_theta_image(make_element(dup, {}), 8, zz), Error);

  // two tails with identical members
  CHECK_THROWS_AS(
      in_theta_image(make_element({}, {escaping_tail(), escaping_tail()}), 8, zz), Error);
}

TEST_CASE("addition merges coefficients and drops cancellations") {
  WedgeConfig zz = integers();

  ThetaElement a = make_element({{1, parse_expr("2:1", zz), Elem{1, 0}}}, {});
  ThetaElement minus_a = make_element({{1, parse_expr("2:1", zz), Elem{-1, 0}}}, {});
  ThetaElement sum = add_theta(a, minus_a, zz);
  CHECK(sum.support.isolated.empty());
  CHECK(sum.support.tails.empty());

  ThetaElement b = make_element({{2, parse_expr("3:1", zz), Elem{1, 0}}}, {});
  ThetaElement uni = add_theta(a, b, zz);
  CHECK(uni.support.isolated.size() == 2);

  ThetaElement twice = add_theta(a, a, zz);
  REQUIRE(twice.support.isolated.size() == 1);
  CHECK(twice.support.isolated[0].coeff == Elem{2, 0});

  // tails with identical shapes combine coefficientwise
  ThetaElement t1 = make_element({}, {escaping_tail()});
  ThetaElement t2 = make_element({}, {escaping_tail()});
  t2.support.tails[0].coeffs.items[0] = {-1, 0};
  CHECK(add_theta(t1, t2, zz).support.tails.empty());
  ThetaElement t3 = add_theta(t1, t1, zz);
  REQUIRE(t3.support.tails.size() == 1);
  CHECK(t3.support.tails[0].coeffs.items[0] == Elem{2, 0});

  // same projections through the declared level without structural equality
  ThetaElement amb1 = make_element({{1, parse_expr("( 2:1 omega[diag 9 1 const 1] )", zz), Elem{1, 0}}}, {});
  ThetaElement amb2 = make_element({{1, parse_expr("( 2:1 omega[diag 9 2 const 1] )", zz), Elem{1, 0}}}, {});
  CHECK_THROWS_AS(add_theta(amb1, amb2, zz), Error);

  ThetaElement other = make_element({}, {});
  other.config_ref = "different";
  CHECK_THROWS_AS(add_theta(a, other, zz), Error);
}

TEST_CASE("in-image elements stay in-image under addition") {
  WedgeConfig zz = integers();
  oracle::Rng rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    ThetaElement a = make_element(
        {{rng.pick(1, 3), parse_expr(std::to_string(rng.pick(4, 6)) + ":1", zz),
          Elem{rng.pick(1, 5), 0}}},
        rng.chance(0.5) ? std::vector<ConvergentTail>{escaping_tail()}
                        : std::vector<ConvergentTail>{});
    ThetaElement b = make_element(
        {{rng.pick(1, 3), parse_expr(std::to_string(rng.pick(4, 6)) + ":1", zz),
          Elem{rng.pick(-5, -1), 0}}},
        std::vector<ConvergentTail>{});
    REQUIRE(in_theta_image(a, 8, zz).kind == ThetaVerdict::InImage);
    REQUIRE(in_theta_image(b, 8, zz).kind == ThetaVerdict::InImage);
    ThetaElement sum = add_theta(a, b, zz);
    if (sum.support.isolated.empty() && sum.support.tails.empty()) continue;
    CHECK(in_theta_image(sum, 8, zz).kind == ThetaVerdict::InImage);
  }
}

TEST_CASE("cyclic coefficient groups cancel modulo their order") {
  WedgeConfig zz = integers();
  ThetaElement a = make_element({{1, parse_expr("2:1", zz), Elem{1, 0}}}, {});
  a.coeff_groups.fallback = cyclic_group(2);
  ThetaElement b = a;
  ThetaElement sum = add_theta(a, b, zz);
  CHECK(sum.support.isolated.empty());  // 1 + 1 = 0 in Z/2

  ThetaElement bad = a;
  bad.support.isolated[0].coeff = Elem{2, 0};  // out of range for Z/2
  CHECK_THROWS_AS(in_theta_image(bad, 8, zz), Error);
}

TEST_CASE("theta files parse, validate, and round-trip") {
  WedgeConfig zz = integers();
  std::string text =
      "theta earring level 8\n"
      "coeffgroup default integer\n"
      "coeffgroup 3 cyclic 2\n"
      "iso 1 e 1\n"
      "iso 2 ( 3:1 ) 2\n"
      "tail limit e summand diag 1 1 escape diag 1 1 members none coeffs const 1\n"
      "tail limit ( 2:1 ) summand const 4 escape const 0 members diag 1 0 pow 1 coeffs const 1\n";
  ThetaElement el = parse_theta(text, zz);
  CHECK(el.level == 8);
  CHECK(el.config_ref == "earring");
  CHECK(el.coeff_groups.at(3).kind == GroupKind::Cyclic);
  CHECK(el.support.isolated.size() == 2);
  CHECK(el.support.tails.size() == 2);
  CHECK_FALSE(el.support.tails[0].members.has_value());
  REQUIRE(el.support.tails[1].members.has_value());
  CHECK(el.support.tails[1].members->recipe.kind == RecipeKind::Pow);

  ThetaElement again = parse_theta(format_theta(el, zz), zz);
  CHECK(again == el);

  CHECK_THROWS_AS(parse_theta("iso 1 e 1\n", zz), Error);  // missing header
}
