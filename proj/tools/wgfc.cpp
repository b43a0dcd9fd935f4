// Command-line front end. See `wgfc --help` or the README for usage.
#include <cstring>
#include <iostream>

#include "wgfc/config.hpp"
#include "wgfc/errors.hpp"

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--help") == 0 || std::strcmp(argv[i], "-h") == 0) {
      std::cout << wgfc::cli::usage();
      return 0;
    }
  }
  if (argc < 2) {
    std::cerr << wgfc::cli::usage();
    return 1;
  }
  try {
    const wgfc::cli::RunConfig cfg = wgfc::cli::parse_command_line(argc, argv);
    return wgfc::cli::run(cfg, std::cout, std::cerr);
  } catch (const wgfc::ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 1;
  } catch (const wgfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
