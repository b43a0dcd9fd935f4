// Config-file and flag handling for the command-line tool, plus the command
// runners. Config files are line-oriented `key = value` with optional
// `[section]` headers (sections are organizational only), `#` comments and
// UTF-8 text; unknown keys are errors. Flags `--key value` override file
// values; hyphens in key names are interchangeable with underscores.
#ifndef WGFC_CONFIG_HPP
#define WGFC_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wgfc::cli {

struct RunConfig {
  std::string command;
  std::map<std::string, std::pair<std::string, int>> values;  // key -> (value, line)

  bool has(const std::string& key) const { return values.count(key) != 0; }
  // Throw ConfigError naming the key when it is absent.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key) const;
  double get_real_or(const std::string& key, double fallback) const;
  std::size_t get_index(const std::string& key) const;
  std::size_t get_index_or(const std::string& key, std::size_t fallback) const;
  void set(const std::string& key, const std::string& value, int line = 0);
};

// Reads one config file; recognizes the special key `command`.
RunConfig parse_config_file(const std::string& path);

// argv layout: [command] [--config <path>] [--key value]... ; flags win over
// file values, and a command given on the command line wins over the file.
RunConfig parse_command_line(int argc, const char* const* argv);

// Checks that the command exists and every present key is allowed and every
// unconditionally required key is present.
void validate(const RunConfig& cfg);

// Executes the command; writes the output file; returns the process exit
// code: 0 on success, 2 when a configured `threshold` is exceeded by the
// verification gap. Errors are reported by exception.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace wgfc::cli

#endif
