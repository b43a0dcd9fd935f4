#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgfc/config.hpp"
#include "wgfc/errors.hpp"

using namespace wgfc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "wgfc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Runs the installed CLI binary; returns its exit code.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(WGFC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

cli::RunConfig config_from_text(const std::string& text) {
  const fs::path p = scratch_dir() / "inline.cfg";
  write_text(p, text);
  return cli::parse_config_file(p.string());
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing: minimal file, sections, comments") {
  const auto cfg = config_from_text(
      "# example\n"
      "command = ml-eval\n"
      "[problem]\n"
      "beta = 0.5   # inline comment\n"
      "z = -1\n");
  CHECK(cfg.command == "ml-eval");
  CHECK(cfg.get_real("beta") == 0.5);
  CHECK(cfg.get_real("z") == -1.0);
  CHECK_NOTHROW(cli::validate(cfg));
}

TEST_CASE("config parsing: errors carry the key and line") {
  try {
    config_from_text("command = frac-int\nn 4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }

  try {
    config_from_text("command = ml-eval\nbeta = 1\nbeta = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "beta");
    CHECK(e.line == 3);
  }
}

TEST_CASE("validation: missing and unknown keys") {
  // Missing beta for frac-int names the key.
  auto cfg = config_from_text(
      "command = frac-int\na = 0\nb = 1\nn = 8\nalpha = 0\nf = x\n");
  try {
    cli::validate(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "beta");
  }

  auto cfg2 = config_from_text("command = ml-eval\nbeta = 1\nz = 0\nbogus = 1\n");
  try {
    cli::validate(cfg2);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key == "bogus");
  }

  auto cfg3 = config_from_text("beta = 1\nz = 0\n");
  CHECK_THROWS_AS(cli::validate(cfg3), ConfigError);
}

TEST_CASE("flags override file values") {
  const fs::path p = scratch_dir() / "override.cfg";
  write_text(p,
             "command = ml-eval\n"
             "beta = 1\n"
             "z = 0\n"
             "max_terms = 128\n");
  const std::string path = p.string();
  const char* argv[] = {"wgfc", "--config", path.c_str(), "--max-terms", "256"};
  const auto cfg = cli::parse_command_line(5, argv);
  CHECK(cfg.get_index("max_terms") == 256);
  CHECK(cfg.get_real("beta") == 1.0);

  const char* argv2[] = {"wgfc", "frac-int", "--config", path.c_str()};
  const auto cfg2 = cli::parse_command_line(4, argv2);
  CHECK(cfg2.command == "frac-int");  // the command-line command wins
}

TEST_CASE("end to end: golden outputs are reproduced byte for byte") {
  const fs::path dir = scratch_dir();
  const fs::path golden = fs::path(WGFC_GOLDEN_DIR);

  const fs::path ml = dir / "ml.json";
  CHECK(run_cli("ml-eval --beta 1 --z 0 --output " + ml.string()) == 0);
  CHECK(slurp(ml) == slurp(golden / "ml_eval_one.json"));

  const fs::path fd = dir / "fd.csv";
  CHECK(run_cli("frac-deriv --a 0 --b 1 --n 8 --alpha 0 --beta 1 --f x^2 --output " +
                fd.string()) == 0);
  CHECK(slurp(fd) == slurp(golden / "frac_deriv_identity.csv"));

  const fs::path vi = dir / "vi.json";
  CHECK(run_cli("verify-inverse --a 0 --b 1 --n 64 --alpha 0 --beta 1 --f x "
                "--side left --n-list 16,32,64 --output " +
                vi.string()) == 0);
  CHECK(slurp(vi) == slurp(golden / "verify_inverse_alpha0.json"));
}

TEST_CASE("end to end: identical runs are byte-identical") {
  const fs::path dir = scratch_dir();
  const fs::path out1 = dir / "run1.csv";
  const fs::path out2 = dir / "run2.csv";
  const std::string args =
      "frac-deriv --a 0 --b 1 --n 96 --alpha 0.4 --beta 0.8 --f 'sin(x)' "
      "--w '1+x^2' --output ";
  CHECK(run_cli(args + out1.string()) == 0);
  CHECK(run_cli(args + out2.string()) == 0);
  const std::string text = slurp(out1);
  CHECK(text == slurp(out2));

  // CSV contract: exact header, LF line endings, n+1 data rows.
  CHECK(text.rfind("t,value\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n';
  CHECK(rows == 1 + 97);

  // Serial execution produces the same bytes as the parallel kernels.
  const fs::path out3 = dir / "run3.csv";
  CHECK(run_cli(args + out3.string() + " --exec serial") == 0);
  CHECK(text == slurp(out3));
}

TEST_CASE("end to end: exit codes") {
  const fs::path dir = scratch_dir();

  // Threshold semantics: an unattainable bound exits 2.
  CHECK(run_cli("verify-ibp --a 0 --b 1 --n 32 --identity samko --beta 0.6 "
                "--f 'exp(x)' --g 'sin(x)' --n-list 16,32 --threshold 1e-20 --output " +
                (dir / "ibp.json").string()) == 2);
  // The same run with a sane bound exits 0.
  CHECK(run_cli("verify-ibp --a 0 --b 1 --n 32 --identity samko --beta 0.6 "
                "--f 'exp(x)' --g 'sin(x)' --n-list 16,32 --threshold 1e-1 --output " +
                (dir / "ibp2.json").string()) == 0);

  // alpha = 0 inversion: exit 0 and a zero gap against any positive bound.
  CHECK(run_cli("verify-inverse --a 0 --b 1 --n 32 --alpha 0 --beta 1 --f x "
                "--side right --n-list 16,32 --threshold 1e-13 --output " +
                (dir / "vi0.json").string()) == 0);

  // Config errors exit 1.
  CHECK(run_cli("frac-int --a 0 --b 1 --n 8 --alpha 0 --f x") == 1);  // no beta
  CHECK(run_cli("no-such-command --a 0") == 1);
  CHECK(run_cli("ml-eval --beta 1 --z 0 --bogus 3") == 1);
  CHECK(run_cli("") == 1);

  // Runtime evaluation failures exit 1 as well.
  CHECK(run_cli("frac-int --a -1 --b 1 --n 8 --alpha 0.3 --beta 1 --f 'log(x)'") == 1);
}

TEST_CASE("end to end: solver and residual commands produce trajectories") {
  const fs::path dir = scratch_dir();
  const fs::path sol = dir / "sol.csv";
  CHECK(run_cli("solve-variational --a 0 --b 1 --n 48 --alpha 0.4 --beta 0.8 "
                "--m 1 --v '0.5*x^2' --x-a 0 --x-b 1 --output " +
                sol.string()) == 0);
  const std::string text = slurp(sol);
  CHECK(text.rfind("t,X,DL_X,DR_X,residual\n", 0) == 0);

  const fs::path nl = dir / "nl.csv";
  CHECK(run_cli("newton-law --a 0 --b 1 --n 32 --alpha 0 --beta 1 --m 2 "
                "--v 'x^2/2-x' --x '-1' --output " +
                nl.string()) == 0);
  // At alpha = 0 with X == c/(1-m) = -1 the force balance is exact: the
  // residual column is identically zero.
  std::istringstream lines(slurp(nl));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto last_comma = line.rfind(',');
    CHECK(line.substr(last_comma + 1) == "0");
  }

  const fs::path el = dir / "el.csv";
  CHECK(run_cli("el-residual --a 0 --b 1 --n 32 --alpha 0 --beta 1 --m 2 "
                "--v 'x^2/2-x' --x '-1' --output " +
                el.string()) == 0);
  CHECK(slurp(el) == slurp(nl));  // kinetic form: same residual as newton-law

  const fs::path ab = dir / "ab.json";
  CHECK(run_cli("verify-ab --a 0 --b 1 --n 64 --alpha 0.5 --f 'exp(x)' --g 'sin(x)' "
                "--n-list 32,64 --threshold 1e-12 --output " +
                ab.string()) == 0);
  const std::string ab_text = slurp(ab);
  CHECK(ab_text.find("\"identity_id\": \"AbReduction\"") != std::string::npos);
  CHECK(ab_text.find("ibp_integral_gap") != std::string::npos);

  // The example configs shipped with the repo parse and validate.
  for (const char* name :
       {"ml_eval.cfg", "frac_deriv.cfg", "verify_inverse.cfg", "verify_ibp.cfg",
        "newton_law.cfg", "solve_variational.cfg"}) {
    const auto cfg = cli::parse_config_file((fs::path(WGFC_CONFIG_DIR) / name).string());
    CHECK_NOTHROW(cli::validate(cfg));
  }
}

TEST_SUITE_END();
