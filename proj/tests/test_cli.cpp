#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(HIGA_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("higa_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run writes the convergence CSV and a rate summary") {
  const Outcome o = cli("run --problem square --degree 2 --max-steps 3");
  CHECK(o.code == 0);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,n_elements,n_dofs,max_level,estimator,energy_error");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    if (line.rfind("rate", 0) == 0) last = line;
    else ++rows;
  }
  CHECK(rows == 3);
  CHECK(last == "rate estimator n/a energy_error n/a");
}

TEST_CASE("run to a file") {
  const fs::path dir = scratch();
  const fs::path csv = dir / "run.csv";
  const Outcome o = cli("run --problem lshape --degree 2 --max-steps 4 --quiet --out " + csv.string());
  CHECK(o.code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("step,n_elements", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with code 2") {
  CHECK(cli("run --problem disk").code == 2);
  CHECK(cli("run --theta 2").code == 2);
  CHECK(cli("run --degree 0").code == 2);
  CHECK(cli("run --mode sideways").code == 2);
  CHECK(cli("run --no-such-option").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("dump-mesh --in /nonexistent/mesh.txt").code == 2);
}

TEST_CASE("solver failure exits with code 3") {
  CHECK(cli("run --problem square --degree 3 --max-steps 4 --solver gmres --gmres-max-iterations 1").code == 3);
}

TEST_CASE("verify-axioms") {
  const Outcome o = cli("verify-axioms --scenarios 10");
  CHECK(o.code == 0);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(o.out.find("PASS") != std::string::npos);
}

TEST_CASE("dump-mesh round trip and dump-system") {
  const fs::path dir = scratch();
  const fs::path mesh = dir / "mesh.txt", again = dir / "again.txt";
  CHECK(cli("dump-mesh --problem quarter-ring --degree 2 --max-steps 5 --out " + mesh.string()).code == 0);
  CHECK(cli("dump-mesh --in " + mesh.string() + " --out " + again.string()).code == 0);
  const std::string text = slurp(mesh);
  CHECK(text.rfind("# hierarchical-mesh v1\n", 0) == 0);
  CHECK(text == slurp(again));

  const fs::path mat = dir / "a.mtx", rhs = dir / "b.mtx";
  const Outcome o = cli("dump-system --problem quarter-ring --degree 2 --mesh " + mesh.string() + " --matrix " +
                        mat.string() + " --rhs " + rhs.string());
  CHECK(o.code == 0);
  CHECK(o.out.find("unknowns") != std::string::npos);
  CHECK(slurp(mat).rfind("%%MatrixMarket matrix coordinate real general\n", 0) == 0);
  CHECK(slurp(rhs).rfind("%%MatrixMarket matrix array real general\n", 0) == 0);

  // A mesh over other level-0 knots is rejected.
  CHECK(cli("dump-system --problem quarter-ring --degree 3 --mesh " + mesh.string() + " --matrix " + mat.string())
            .code == 2);
  fs::remove_all(dir);
}
