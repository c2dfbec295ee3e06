#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "averop/json_io.hpp"
#include "averop/version.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

struct Flags {
  std::string document;
  std::optional<unsigned long long> seed;
  std::optional<long> samples;
  std::optional<double> tol;
  std::optional<long> max_iter;
  std::optional<int> refine;
  bool csv = false;
  std::string out_path;
};

int run(const std::string& command, const Flags& flags) {
  std::ifstream in(flags.document);
  if (!in) {
    std::cerr << "error: cannot open document " << flags.document << "\n";
    return kExitParse;
  }
  averop::json doc;
  try {
    in >> doc;
  } catch (const averop::json::exception& e) {
    std::cerr << "error: " << flags.document << ": " << e.what() << "\n";
    return kExitParse;
  }

  averop::AnalysisRequest request;
  try {
    if (command != "run") {
      // the subcommand fixes the command; a conflicting document is rejected
      if (doc.contains("command") && doc["command"].is_string() &&
          doc["command"].get<std::string>() != command) {
        std::cerr << "error: document command '" << doc["command"].get<std::string>()
                  << "' conflicts with subcommand '" << command << "'\n";
        return kExitValidation;
      }
      doc["command"] = command;
    }
    request = averop::parse_request(doc);
    if (flags.seed) request.params.seed = *flags.seed;
    if (flags.samples) request.params.samples = *flags.samples;
    if (flags.tol) request.params.tol = *flags.tol;
    if (flags.max_iter) request.params.max_iter = *flags.max_iter;
    if (flags.refine) request.params.refine = *flags.refine;
  } catch (const averop::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const averop::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  averop::json report;
  try {
    report = averop::run_request(request);
  } catch (const averop::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const averop::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }

  std::string rendered;
  if (flags.csv) {
    if (auto csv = averop::report_to_csv(report)) {
      rendered = *csv;
    } else {
      rendered = report.dump(2) + "\n";
    }
  } else {
    rendered = report.dump(2) + "\n";
  }
  if (!flags.out_path.empty()) {
    std::ofstream out(flags.out_path);
    if (!out) {
      std::cerr << "error: cannot write " << flags.out_path << "\n";
      return kExitNumerical;
    }
    out << rendered;
  } else {
    std::cout << rendered;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"averaged-operator calculus and verification toolkit"};
  app.set_version_flag("--version", averop::kVersion);
  app.require_subcommand(1);

  Flags flags;
  static const char* commands[] = {"analyze", "estimate", "iterate", "invert",
                                   "classify", "verify",   "run"};
  std::vector<CLI::App*> subs;
  for (const char* name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("document", flags.document, "operator-specification document (JSON)")
        ->required();
    auto numeric = [](auto setter) {
      return [setter](const CLI::results_t& r) {
        try {
          setter(r[0]);
        } catch (const std::exception&) {
          return false;
        }
        return true;
      };
    };
    sub->add_option("--seed",
                    numeric([&flags](const std::string& s) { flags.seed = std::stoull(s); }),
                    "sample seed");
    sub->add_option("--samples",
                    numeric([&flags](const std::string& s) { flags.samples = std::stol(s); }),
                    "sample count");
    sub->add_option("--tol", numeric([&flags](const std::string& s) { flags.tol = std::stod(s); }),
                    "tolerance");
    sub->add_option("--max-iter",
                    numeric([&flags](const std::string& s) { flags.max_iter = std::stol(s); }),
                    "iteration cap");
    sub->add_option("--refine",
                    numeric([&flags](const std::string& s) { flags.refine = std::stoi(s); }),
                    "witness refinement steps");
    sub->add_flag("--csv", flags.csv, "flatten orbits and estimates to CSV");
    sub->add_option("--out", flags.out_path, "write the report to a file");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return run(commands[i], flags);
  }
  return kExitParse;
}
