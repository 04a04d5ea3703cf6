#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freedom/serialize.hpp"

using namespace freedom;

TEST_CASE("rational strings") {
  Rational q(6, 4);
  CHECK(rational_str(q) == "3/2");
  CHECK(rational_str(Rational(-5)) == "-5");
}

TEST_CASE("lattice JSON round trip") {
  RationalMatrix g(2, 2);
  g << Rational(2), Rational(1, 3), Rational(1, 3), Rational(5, 7);
  EuclideanLattice l(g);
  Json j = lattice_to_json(l);
  CHECK(j["rank"] == 2);
  CHECK(j["gram"][1] == "1/3");
  CHECK(lattice_from_json(j) == l);
  CHECK(lattice_from_text(j.dump()) == l);

  CHECK_THROWS_AS(lattice_from_text("{"), InputError);
  CHECK_THROWS_AS(lattice_from_text(R"({"rank": 2, "gram": ["1", "0", "0"]})"), InputError);
  CHECK_THROWS_AS(lattice_from_text(R"({"rank": 2, "gram": ["1", "1", "0", "1"]})"), InputError);
  CHECK_THROWS_AS(lattice_from_text(R"({"rank": 2, "gram": ["1", "2", "2", "1"]})"), InputError);
  CHECK_THROWS_AS(lattice_from_text(R"({"rank": 1, "gram": [0.5]})"), InputError);
  CHECK_THROWS_AS(lattice_from_text(R"({"gram": []})"), InputError);
}

TEST_CASE("log values as JSON") {
  Json single = as_json(LogValue(Rational(-1, 2), 4));
  CHECK(single["coefficient"] == "-1/2");
  CHECK(single["base"] == "4");
  CHECK(single["float"].get<std::string>().substr(0, 12) == "-0.693147180");

  set_log_merge_cap(8);
  LogValue sum = LogValue::log(1000003) + LogValue::log(1000033);
  set_log_merge_cap(1 << 20);
  REQUIRE(!sum.is_single());
  Json formal = as_json(sum);
  CHECK(formal["terms"].size() == 2);
  CHECK(formal["float"].get<std::string>().substr(0, 7) == "27.6310");

  CHECK(as_json(LogValue())["float"] == "0");
}

TEST_CASE("Newton polygon JSON") {
  RationalMatrix g(2, 2);
  g << 1, 0, 0, 4;
  Json j = as_json(newton_polygon(EuclideanLattice(g)));
  CHECK(j["rank"] == 2);
  CHECK(j["slopes"].size() == 2);
  CHECK(j["slopes"][0]["float"] == "0");
  CHECK(j["slopes"][1]["coefficient"] == "-1/2");
  CHECK(j["slopes"][1]["base"] == "4");
  CHECK(j["witnesses"][1][0] == Json::array({"1", "0"}));
  CHECK(j["search_bounds"].size() == 3);
}

TEST_CASE("freedom JSON and point rows") {
  FreedomReport r = freedom_report(ProjectivePoint::parse("1:3"));
  Json j = as_json(r);
  CHECK(j["freedom"]["exact"] == "1");
  CHECK(j["freedom"]["float"] == "1");
  CHECK(as_json(FreedomValue())["exact"] == "0");

  FreedomReport p = freedom_report(ProjectivePoint::parse("1:2:2"));
  CHECK(as_json(p)["freedom"]["exact"].get<std::string>().find("ln") != std::string::npos);
  std::string row = point_csv_row("1:2:2", p);
  CHECK(row.rfind("1:2:2,27,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 5);
  CHECK(point_csv_header() == "coords,H,h,mu_min,mu_max,freedom_float");
}

TEST_CASE("count CSV") {
  std::string h = count_csv_header();
  CHECK(std::count(h.begin(), h.end(), ',') == 24);
  CHECK(h.rfind("variety,B,total,free,mean_freedom,bin_00,", 0) == 0);
  CHECK(h.substr(h.size() - 6) == "bin_19");
  CountRow row = count_free(VarietyDescriptor::projective(1), 5);
  CHECK(count_csv_row("P1", row) == "P1,5,8,6,0.75,2,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,6");
}

TEST_CASE("count report JSON") {
  CountOptions o;
  o.low_threshold = Rational(7, 10);
  CountReport r = count_report(VarietyDescriptor::projective(2), {100, 1000, 10000, 100000}, o);
  Json j = as_json(r, Json{{"build", "x"}});
  CHECK(j["rows"].size() == 4);
  CHECK(j["rows"][0]["B"] == "100");
  CHECK(j["rows"][0].contains("below_threshold"));
  CHECK(j["fit"].is_object());
  CHECK(j["power_fit"]["b"] == "1");
  CHECK(j["provenance"]["build"] == "x");
  CHECK(j["descriptor"] == "kind=projective;dims=2;weights=1");
}

TEST_CASE("hashes and descriptors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
  std::string bt = describe(VarietyDescriptor::preset("BT"));
  CHECK(bt.rfind("kind=hypersurface;dims=3,3;weights=1,3;term=1:3 0 0 0|1 0 0 0;", 0) == 0);
  CHECK(describe(VarietyDescriptor::preset("P1xP2")) == "kind=product;dims=1,2;weights=1,1");
  CHECK(!build_describe().empty());
}
