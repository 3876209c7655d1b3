#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef RPMSIM_PATH
#error "RPMSIM_PATH must point at the CLI binary"
#endif

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RPMSIM_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("experiment fairness --mode bogus").code == 1);
  CHECK(run("stability --c 1000 --d 0.04 --ds 0.04").code == 1);
  CHECK(run("simulate /nonexistent/scenario.json").code == 1);
}

TEST_CASE("cli stability") {
  const auto one = run("stability --c 1000 --d 0.04 --ds 0.01");
  CHECK(one.code == 0);
  CHECK(lines(one.out) == 2);
  CHECK(one.out.rfind("a,b,c,d,d_s,s,gamma,eta,alpha,omega,s_star,max_root_re,verdict\n", 0) == 0);
  const auto sweep = run("stability --c 1000 --d 0.04 --sweep ds --samples 7");
  CHECK(sweep.code == 0);
  CHECK(lines(sweep.out) == 8);
}

TEST_CASE("cli fairness experiment at scale 0.01") {
  const auto r = run("experiment fairness --mode rpm --scale 0.01 --reps 1 --duration 3");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 12);
}

TEST_CASE("cli simulate") {
  const std::string path = "cli_test_scenario.json";
  {
    std::ofstream os(path);
    os << R"({"nodes":[{"name":"A"},{"name":"S","kind":"switch"},{"name":"B"}],
             "links":[{"a":"A","b":"S","capacity_bps":10000000,"delay_ns":1000000},
                      {"a":"S","b":"B","capacity_bps":10000000,"delay_ns":1000000}],
             "flows":[{"src":"A","dst":"B","size_mss":10}],
             "duration_ns":500000000})";
  }
  const auto r = run("simulate " + path);
  CHECK(r.code == 0);
  CHECK(r.out.find(",complete,") != std::string::npos);
  std::remove(path.c_str());
}
