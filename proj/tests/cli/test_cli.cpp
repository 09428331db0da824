#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "cli-scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run rank_lab(const std::string& args) {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd =
      "cd '" + scratch().string() + "' && '" RANK_LAB_EXE "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const std::string& name) {
  std::ifstream f(scratch() / name, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(name));
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE(!line.empty());
    REQUIRE(line.back() == '\r');
    line.pop_back();
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') field += '"', ++i;
        else if (ch == '"') quoted = false;
        else field += ch;
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(field);
        field.clear();
      } else {
        field += ch;
      }
    }
    fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

} // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(rank_lab("").code == 2);
  CHECK(rank_lab("no-such-command").code == 2);
  CHECK(rank_lab("dp-rank --bogus 1").code == 2);
  CHECK(rank_lab("mlambda --dist exp:1").code == 2);
  CHECK(rank_lab("mlambda --dist exp:1 --lambda 0.5 --samples 10").code == 2);
  CHECK(rank_lab("mlambda --dist weird:1 --lambda 2 --samples 10").code == 2);
  CHECK(rank_lab("robbins --rule fixed --theta 1,2,3").code == 2);
  CHECK(rank_lab("robbins --trials 1.5").code == 2);
  CHECK(rank_lab("verify --suite nope").code == 2);
  CHECK(rank_lab("verify --suite corollary --n 10").code == 2);
  CHECK(rank_lab("dp-full --n 4").code == 2);
  CHECK(rank_lab("--help").code == 0);
}

TEST_CASE("verify corollary example exits 0") {
  const auto r = rank_lab("verify --suite corollary --trials 1e5 --seed 1");
  CHECK(r.code == 0);
  const auto rows = read_csv("verify.csv");
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"suite", "params", "lhs", "rhs", "slack", "violated"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] == "0");
}

TEST_CASE("dp-rank n=2 prints 1.5") {
  const auto r = rank_lab("dp-rank --n 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("1.5") != std::string::npos);
  const auto rows = read_csv("dp-rank.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][3] == "1.5");
  CHECK(fs::exists(scratch() / "dp-rank.csv.config"));
  CHECK(slurp("dp-rank.csv.summary.txt") == r.out);
}

TEST_CASE("mlambda deterministic increments give mean 0 and SE 0") {
  const auto r = rank_lab("mlambda --dist det:0.5 --lambda 1 --p 2 --samples 10");
  CHECK(r.code == 0);
  CHECK(r.out.find("= 0 +- 0") != std::string::npos);
  const auto rows = read_csv("mlambda.csv");
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == std::vector<std::string>{"sample_index", "value", "argmax_index", "stop_reason"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == "0");
}

TEST_CASE("mlambda verdict line") {
  const auto r = rank_lab("mlambda --dist exp:1 --lambda 2 --samples 2e4 --verdict");
  CHECK(r.code == 0);
  const auto at = r.out.find("verdict,slope,p,lambda,dist\n");
  REQUIRE(at != std::string::npos);
  CHECK(r.out.compare(at + 28, 7, "Finite,") == 0);
}

TEST_CASE("every subcommand writes its schema") {
  struct Case {
    std::string args, file;
    std::vector<std::string> header;
  };
  const std::vector<std::string> eval{"n",       "p", "rule_id", "rank_moment", "rank_se", "scaled_value_moment",
                                      "scaled_value_se", "trials", "seed"};
  const std::vector<Case> cases{
      {"an-prob --n 10,100 --trials 1e3", "an-prob.csv", {"n", "epsilon", "p_hat", "std_err"}},
      {"robbins --n 10 --trials 1e3", "robbins.csv", eval},
      {"robbins --rule oracle-min --n 10 --trials 1e3 --out o.csv", "o.csv", eval},
      {"dp-rank --n 5 --trials 100", "dp-rank.csv", eval},
      {"dp-full --n 2 --grid 200", "dp-full.csv", eval},
      {"poisson --trials 1e3", "poisson.csv", {"trial", "stopped_t", "stopped_s", "rank", "no_stop_flag"}},
      {"verify --suite section4 --trials 100 --n 10", "verify.csv", {"suite", "params", "lhs", "rhs", "slack", "violated"}},
      {"verify --suite eq1 --trials 1e3 --n 100 --lambda 2 --p 1", "verify.csv",
       {"suite", "params", "lhs", "rhs", "slack", "violated"}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.args);
    REQUIRE(rank_lab(c.args).code == 0);
    const auto rows = read_csv(c.file);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == c.header);
    for (const auto& row : rows) CHECK(row.size() == c.header.size());
  }
}

TEST_CASE("config file values are overridden by flags") {
  {
    std::ofstream f(scratch() / "run.cfg");
    f << "# comment\nn = 20\ntrials = 2e3\nseed = 11\nrule = memoryless\n";
  }
  REQUIRE(rank_lab("robbins --config run.cfg --out a.csv").code == 0);
  auto rows = read_csv("a.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "20");
  CHECK(rows[1][7] == "2000");
  CHECK(rows[1][8] == "11");

  REQUIRE(rank_lab("robbins --config run.cfg --n 30 --out b.csv").code == 0);
  rows = read_csv("b.csv");
  CHECK(rows[1][0] == "30");
  CHECK(rows[1][8] == "11");

  REQUIRE(rank_lab("robbins --n 30 --config run.cfg --out c.csv").code == 0);
  CHECK(read_csv("c.csv")[1][0] == "30");

  const auto echo = slurp("b.csv.config");
  CHECK(echo.find("n=30\n") != std::string::npos);
  CHECK(echo.find("seed=11\n") != std::string::npos);
  CHECK(echo.find("theta=\"2,1,0\"\n") != std::string::npos);
}

TEST_CASE("config echo reproduces the run") {
  REQUIRE(rank_lab("robbins --n 10,50 --trials 3e3 --seed 5 --out e1.csv").code == 0);
  REQUIRE(rank_lab("robbins --config e1.csv.config --out e2.csv").code == 0);
  CHECK(slurp("e1.csv") == slurp("e2.csv"));
}

TEST_CASE("identical configuration gives byte-identical CSV") {
  const std::string args = "robbins --n 100,1000 --trials 2e4 --seed 3 ";
  REQUIRE(rank_lab(args + "--out r1.csv").code == 0);
  REQUIRE(rank_lab(args + "--out r2.csv").code == 0);
  CHECK(slurp("r1.csv") == slurp("r2.csv"));
  REQUIRE(rank_lab("poisson --trials 5e3 --seed 3 --out p1.csv").code == 0);
  REQUIRE(rank_lab("poisson --trials 5e3 --seed 3 --out p2.csv").code == 0);
  CHECK(slurp("p1.csv") == slurp("p2.csv"));
}

TEST_CASE("worker count does not change estimates") {
  const std::string args = "robbins --n 100 --trials 2e4 --seed 3 --chunk-size 1000 ";
  REQUIRE(rank_lab(args + "--workers 1 --out w1.csv").code == 0);
  REQUIRE(rank_lab(args + "--workers 4 --out w4.csv").code == 0);
  CHECK(slurp("w1.csv") == slurp("w4.csv"));
  REQUIRE(rank_lab("mlambda --lambda 2 --samples 1e4 --chunk-size 500 --workers 1 --out m1.csv").code == 0);
  REQUIRE(rank_lab("mlambda --lambda 2 --samples 1e4 --chunk-size 500 --workers 3 --out m3.csv").code == 0);
  CHECK(slurp("m1.csv") == slurp("m3.csv"));
}

TEST_CASE("seed changes estimates") {
  REQUIRE(rank_lab("robbins --n 100 --trials 2e3 --seed 1 --out s1.csv").code == 0);
  REQUIRE(rank_lab("robbins --n 100 --trials 2e3 --seed 2 --out s2.csv").code == 0);
  CHECK(read_csv("s1.csv")[1][3] != read_csv("s2.csv")[1][3]);
}

TEST_CASE("RFC 4180 quoting of fields with commas") {
  REQUIRE(rank_lab("robbins --n 10 --trials 100 --out q.csv").code == 0);
  const auto text = slurp("q.csv");
  CHECK(text.find("\"memoryless:2,1,0\"") != std::string::npos);
  CHECK(read_csv("q.csv")[1][2] == "memoryless:2,1,0");
}
