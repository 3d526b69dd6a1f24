#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "effcon/error.hpp"
#include "effcon/report.hpp"

using namespace effcon;

namespace {

std::string scenario_path(const std::string& name) { return std::string(EFFCON_SCENARIO_DIR) + "/" + name + ".scn"; }

bool same_fields(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.pairs == b.pairs && a.time == b.time && a.parameters == b.parameters &&
         a.constraint == b.constraint && a.vocabulary_pair == b.vocabulary_pair && a.kmax == b.kmax &&
         a.nmax == b.nmax && a.words == b.words && a.order == b.order && a.mode == b.mode &&
         a.expectation_degree == b.expectation_degree && a.moment_order == b.moment_order && a.gauge == b.gauge &&
         a.second_class == b.second_class && a.golden == b.golden;
}

}  // namespace

TEST_CASE("shipped scenarios round trip") {
  for (const char* name : {"linear_q", "linear_q_sharp", "two_component", "free_particle"}) {
    CAPTURE(name);
    Scenario a = load_scenario(scenario_path(name));
    Scenario b = parse_scenario(format_scenario(a));
    CHECK(same_fields(a, b));
    CHECK(format_scenario(b) == format_scenario(a));
    CHECK(a.directory == std::filesystem::path(scenario_path(name)).parent_path().string());
  }
}

TEST_CASE("scenario errors") {
  std::string base = "[system]\npairs = q:p\nconstraint = qhat(q)\n";
  CHECK_NOTHROW(parse_scenario(base));
  CHECK_THROWS_WITH_AS(parse_scenario(base + "colour = red\n"), doctest::Contains("unknown key system.colour"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_scenario(base + "constraint = qhat(p)\n"), doctest::Contains("duplicate key"),
                       ParseError);
  CHECK_THROWS_AS(parse_scenario(base + "[truncation]\norder = two\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(base + "[truncation\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[system]\nconstraint = qhat(q)\n"), ParseError);
  CHECK_NOTHROW(parse_scenario(base + "[gauge]\ncondition = G[0,2]\ncondition = G[1,1]\n"));
}

TEST_CASE("scenario hash follows the source text") {
  std::string base = "[system]\npairs = q:p\nconstraint = qhat(q)\n";
  CHECK(parse_scenario(base).hash == parse_scenario(base).hash);
  CHECK(parse_scenario(base).hash != parse_scenario(base + "# note\n").hash);
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("report text and machine forms") {
  Scenario sc = parse_scenario("[system]\nname = s\npairs = q:p\nconstraint = qhat(q)\n");
  Report r("solve", sc);
  r.section("solutions");
  r.add("G[1,1]", "i*hbar/2");
  r.add("count", 1L);
  std::string hash = hex64(sc.hash);
  CHECK(r.text() == "# solve\n\n[scenario]\nname = s\nhash = " + hash +
                        "\n\n[solutions]\nG[1,1] = i*hbar/2\ncount = 1\n");
  CHECK(r.machine() == "report.title=solve\nscenario.name=s\nscenario.hash=" + hash +
                           "\nsolutions.G[1,1]=i*hbar/2\nsolutions.count=1\n");
}

TEST_CASE("golden grammar") {
  auto es = parse_golden(
      "# comment\norder 3\nsolve a : q = 0\nmode sharp\ndelta d 1 2 : 0  # trailing\nknown a : reason\n", 2,
      TruncationMode::graded);
  REQUIRE(es.size() == 2);
  CHECK(es[0].kind == "solve");
  CHECK(es[0].order == 3);
  CHECK(es[0].mode == TruncationMode::graded);
  CHECK(es[0].known == "reason");
  CHECK(es[1].args == std::vector<std::string>{"1", "2"});
  CHECK(es[1].mode == TruncationMode::sharp);
  CHECK(es[1].payload == "0");
  CHECK_THROWS_AS(parse_golden("frobnicate x : 1\n", 2, TruncationMode::graded), ParseError);
  CHECK_THROWS_AS(parse_golden("delta d 1 : 0\n", 2, TruncationMode::graded), ParseError);
  CHECK_THROWS_AS(parse_golden("solve a q = 0\n", 2, TruncationMode::graded), ParseError);
  CHECK_THROWS_AS(parse_golden("known b : reason\n", 2, TruncationMode::graded), ParseError);
}

TEST_CASE("golden comparison reports perturbed entries") {
  Model m(load_scenario(scenario_path("two_component")));
  GoldenComparer cmp(m);
  auto rs = cmp.compare(parse_golden("observable A1 : G[2,0;0,0]\n"
                                     "observable bad : G[1,1;0,0]\n"
                                     "solve s : G[1,0;1,0] = G[2,0;0,0]\n"
                                     "solve s2 : G[1,0;1,0] = G[2,0;0,0] + i*hbar\n"
                                     "bracket b : {G[2,0;0,0], G[1,1;0,0] + G[0,0;1,1]} = -2*G[2,0;0,0]\n"
                                     "dirac d : {G[0,2;0,0], G[1,1;0,0]} = 3*G[0,2;0,0]\n",
                                     2, TruncationMode::graded));
  REQUIRE(rs.size() == 6);
  CHECK(rs[0].ok);
  CHECK_FALSE(rs[1].ok);
  CHECK(rs[1].detail.find("bracket with") != std::string::npos);
  CHECK(rs[2].ok);
  CHECK_FALSE(rs[3].ok);
  CHECK(rs[3].detail == "difference -i*hbar");
  CHECK(rs[4].ok);
  CHECK_FALSE(rs[5].ok);
  CHECK(count_failures(rs) == 3);
}

TEST_CASE("known mismatches that agree are failures") {
  Model m(load_scenario(scenario_path("linear_q")));
  GoldenComparer cmp(m);
  auto rs = cmp.compare(parse_golden("solve a : G[1,1] = i*hbar/2\nknown a : stale\n"
                                     "solve b : G[1,1] = 0\nknown b : differs\n",
                                     3, TruncationMode::graded));
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].ok);
  CHECK_FALSE(rs[1].ok);
  CHECK(count_failures(rs) == 1);
}

TEST_CASE("entry errors are reported, not thrown") {
  Model m(load_scenario(scenario_path("free_particle")));
  GoldenComparer cmp(m);
  auto rs = cmp.compare(parse_golden("relational r G[0,0;3,0] : 0\nflow f C[f=zz,n=1] : q = 0\n", 2,
                                     TruncationMode::graded));
  REQUIRE(rs.size() == 2);
  CHECK_FALSE(rs[0].ok);
  CHECK(rs[0].detail.find("target not resolvable") != std::string::npos);
  CHECK_FALSE(rs[1].ok);
}
