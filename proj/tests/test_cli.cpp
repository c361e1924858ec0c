#include "test_util.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

namespace {

std::string cli() {
  const char* bin = std::getenv("GRASPDEC_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "GRASPDEC_BIN must point at the CLI binary");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), (path + " should exist"));
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

using graspdec::testutil::TempDir;

TEST_CASE("cli end to end") {
  TempDir dir;
  const std::string data = dir.file("data.eeg");

  REQUIRE(run("synth --out " + data + " --trials-per-class 10 --seed 5") == 0);

  SUBCASE("preprocess writes a loadable file and audit parameters") {
    const std::string out = dir.file("pre.eeg");
    const std::string audit = dir.file("audit");
    CHECK(run("preprocess --in " + data + " --out " + out + " --audit-dir " + audit) == 0);
    CHECK(slurp(out).substr(0, 4) == "EEGE");
    CHECK(slurp(audit + "/normalization.json").find("q50") != std::string::npos);
    CHECK(slurp(audit + "/preprocess.json").find("bandpass") != std::string::npos);
  }

  SUBCASE("evaluate produces the full result grid deterministically") {
    const std::string base = "evaluate --in " + data + " --no-augment --folds 5 --fold-seed 3 ";
    REQUIRE(run(base + "--out-dir " + dir.file("run1") + " --jobs 1") == 0);
    REQUIRE(run(base + "--out-dir " + dir.file("run2") + " --jobs 4") == 0);

    const std::string results = slurp(dir.file("run1/results.csv"));
    int rows = -1;  // minus the header
    for (char c : results) {
      if (c == '\n') ++rows;
    }
    CHECK(rows == 36);  // 6 pairs x 6 models
    CHECK(results.find("chance_level") != std::string::npos);
    CHECK(results.find("class_dis") != std::string::npos);

    // identical bytes across reruns and worker counts
    CHECK(slurp(dir.file("run1/results.csv")) == slurp(dir.file("run2/results.csv")));
    CHECK(slurp(dir.file("run1/folds.csv")) == slurp(dir.file("run2/folds.csv")));
    CHECK(slurp(dir.file("run1/summary.json")) == slurp(dir.file("run2/summary.json")));
  }

  SUBCASE("missing input exits with code 2 and no partial output") {
    CHECK(run("evaluate --in " + dir.file("nope.eeg") + " --out-dir " + dir.file("broken")) == 2);
    std::ifstream probe(dir.file("broken/results.csv"));
    CHECK(!probe.good());
  }

  SUBCASE("usage errors exit with code 2") {
    CHECK(run("evaluate") == 2);
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("evaluate --in " + data + " --out-dir " + dir.file("x") + " --band nope") == 2);
  }

  SUBCASE("ablate writes csv plus svg and zero drop for the baseline") {
    REQUIRE(run("ablate --in " + data + " --out-dir " + dir.file("abl") +
                " --combos 0,9 --pairs TG/Rest --models svm-rbf --no-augment") == 0);
    const std::string csv = slurp(dir.file("abl/ablation.csv"));
    // combo 0 row ends with drop 0
    CHECK(csv.find("\n0,TG/Rest,svm-rbf") != std::string::npos);
    CHECK(csv.find(",0\n") != std::string::npos);
    int rows = -1;
    for (char c : csv) {
      if (c == '\n') ++rows;
    }
    CHECK(rows == 2);  // 2 combos x 1 pair x 1 model

    const std::string svg = slurp(dir.file("abl/ablation.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    int groups = 0;
    for (std::size_t pos = 0; (pos = svg.find("<g class=\"combo\"", pos)) != std::string::npos;
         ++pos) {
      ++groups;
    }
    CHECK(groups == 2);
  }

  SUBCASE("stats compares result sets") {
    const std::string base = "evaluate --in " + data + " --no-augment --pairs TG/Rest,PG/Rest ";
    REQUIRE(run(base + "--out-dir " + dir.file("sa")) == 0);

    SUBCASE("a set against itself gives p = 1") {
      REQUIRE(run("stats --inputs " + dir.file("sa/results.csv") + " " +
                  dir.file("sa/results.csv") + " --out " + dir.file("self.csv") +
                  " --reps 50 --seed 2") == 0);
      const std::string csv = slurp(dir.file("self.csv"));
      CHECK(csv.find(",1,50,") != std::string::npos);  // p_signed_rank == 1
    }

    SUBCASE("a planted accuracy gap is detected") {
      // fabricate a shifted copy of the results file
      std::ifstream in(dir.file("sa/results.csv"));
      std::ofstream out(dir.file("shifted.csv"));
      std::string line;
      std::getline(in, line);
      out << line << "\n";
      while (std::getline(in, line)) {
        // mean_accuracy is column 7 (0-based 6)
        std::size_t pos = 0;
        for (int c = 0; c < 6; ++c) pos = line.find(',', pos) + 1;
        const std::size_t end = line.find(',', pos);
        const double acc = std::stod(line.substr(pos, end - pos));
        out << line.substr(0, pos) << acc - 0.4 << line.substr(end) << "\n";
      }
      out.close();
      REQUIRE(run("stats --inputs " + dir.file("sa/results.csv") + " " + dir.file("shifted.csv") +
                  " --out " + dir.file("gap.csv") + " --reps 200 --subset-size 6 --seed 2") == 0);
      const std::string csv = slurp(dir.file("gap.csv"));
      // last two columns: fraction significant then median p
      const std::size_t last = csv.rfind(',');
      const std::size_t prev = csv.rfind(',', last - 1);
      const double fraction = std::stod(csv.substr(prev + 1, last - prev - 1));
      CHECK(fraction >= 0.9);
    }

    SUBCASE("zero bootstrap reps is a config error") {
      CHECK(run("stats --inputs " + dir.file("sa/results.csv") + " " + dir.file("sa/results.csv") +
                " --out " + dir.file("z.csv") + " --reps 0") == 2);
    }

    SUBCASE("fewer than two inputs is a usage error") {
      CHECK(run("stats --inputs " + dir.file("sa/results.csv") + " --out " + dir.file("z.csv")) ==
            2);
    }
  }

  SUBCASE("actuate-check validates tables") {
    CHECK(run("actuate-check") == 0);
    CHECK(run("actuate-check --label TG") == 0);
    // an invalid table exits with a config error
    std::ofstream bad(dir.file("bad_table.json"));
    bad << R"({"TG": {"channel": "close", "millivolts": 500, "duration_ms": 100},
               "PG": {"channel": "close", "millivolts": 1300, "duration_ms": 600},
               "Open": {"channel": "open", "millivolts": 1200, "duration_ms": 500},
               "Rest": {"channel": "none", "millivolts": 0, "duration_ms": 0}})";
    bad.close();
    CHECK(run("actuate-check --table " + dir.file("bad_table.json")) == 2);
  }

  SUBCASE("synth rerun with the same seed is byte-identical") {
    const std::string again = dir.file("again.eeg");
    REQUIRE(run("synth --out " + again + " --trials-per-class 10 --seed 5") == 0);
    CHECK(slurp(data) == slurp(again));
  }
}
