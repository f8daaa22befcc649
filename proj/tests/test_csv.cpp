#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "test_support.hpp"
#include "tpb/csv.hpp"
#include "tpb/error.hpp"

using namespace tpb;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("tpb_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("sample CSV survives a write/read round trip") {
  TwoPhaseSample s = tpb_test::make_sample({{4, 2}, {3, 3}});
  s.units[0].y = 0.123456789012345;
  s.units[0].v = {1.0 / 3.0};
  std::string path = temp_path("roundtrip.csv");
  write_sample_csv(s, path);
  TwoPhaseSample back = read_sample_csv(path);
  REQUIRE(back.units.size() == s.units.size());
  CHECK(back.units[0].y == s.units[0].y);  // 17 significant digits round-trip
  CHECK(back.units[0].v[0] == s.units[0].v[0]);
  CHECK(back.strata.size() == 2);
  CHECK(back.strata[1].n == 3);
  for (std::size_t i = 0; i < s.units.size(); ++i) {
    CHECK(back.units[i].sampled == s.units[i].sampled);
    if (s.units[i].sampled) CHECK(back.units[i].x == s.units[i].x);
  }
  std::remove(path.c_str());
}

TEST_CASE("reader rejects malformed files") {
  std::string path = temp_path("bad.csv");

  write_file(path, "");
  CHECK_THROWS_AS(read_sample_csv(path), Error);

  write_file(path, "a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_sample_csv(path), Error);

  // x value on an unsampled row
  write_file(path, "id,stratum,xi,y,delta,v1,x1\n1,1,0,1.0,0,2.0,9\n2,1,1,1.0,0,2.0,1\n");
  CHECK_THROWS_AS(read_sample_csv(path), Error);

  // xi outside {0,1}
  write_file(path, "id,stratum,xi,y,delta,v1,x1\n1,1,2,1.0,0,2.0,1\n");
  CHECK_THROWS_AS(read_sample_csv(path), Error);

  std::remove(path.c_str());
}

TEST_CASE("reader derives stratum specs from the rows") {
  std::string path = temp_path("derive.csv");
  write_file(path,
             "id,stratum,xi,y,delta,v1,x1\n"
             "1,1,1,0.5,1,1.0,1\n"
             "2,1,1,0.6,0,2.0,0\n"
             "3,2,1,0.7,0,1.5,1\n"
             "4,2,0,0.8,0,2.5,\n");
  TwoPhaseSample s = read_sample_csv(path);
  REQUIRE(s.strata.size() == 2);
  CHECK(s.strata[0].N == 2);
  CHECK(s.strata[0].n == 2);
  CHECK(s.strata[1].N == 2);
  CHECK(s.strata[1].n == 1);
  std::remove(path.c_str());
}

TEST_CASE("weight dump writer emits one row per unit") {
  TwoPhaseSample s = tpb_test::make_sample({{2, 1}});
  std::string path = temp_path("weights.csv");
  {
    WeightDumpWriter writer(path);
    writer.append(0, s, {1.0, 2.0}, {1.0, 0.0}, {1.0, 0.0});
  }
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "replicate,id,w1,w2,w");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
  std::remove(path.c_str());
}
