#include "rif/report.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rif {

Scalar RunConfig::tolerance_for(const std::string& check_id, Scalar fallback) const {
  const auto it = tolerance_overrides.find(check_id);
  return it == tolerance_overrides.end() ? fallback : it->second;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) out[static_cast<std::size_t>(k)] = digits[v & 0xf];
  return out;
}

std::vector<const CheckReport*> sorted_by_id(const std::vector<CheckReport>& reports) {
  std::vector<const CheckReport*> ptr;
  for (const auto& r : reports) ptr.push_back(&r);
  std::sort(ptr.begin(), ptr.end(), [](const CheckReport* a, const CheckReport* b) {
    return a->check_id < b->check_id;
  });
  return ptr;
}

}  // namespace

std::string render_reports(const std::vector<CheckReport>& reports,
                           const RunConfig& config) {
  const auto ordered = sorted_by_id(reports);
  if (config.format == RunConfig::Format::Csv) {
    std::ostringstream out;
    out << "check_id,claim,inputs_digest,holds,tolerance,values";
    if (config.include_timings) out << ",runtime_ms";
    out << '\n';
    for (const CheckReport* r : ordered) {
      out << r->check_id << ',' << r->claim << ',' << hex64(r->inputs_digest) << ','
          << (r->holds ? "true" : "false") << ','
          << nlohmann::json(r->tolerance).dump() << ',';
      for (std::size_t k = 0; k < r->values.size(); ++k) {
        if (k) out << ';';
        out << r->values[k].first << '=' << nlohmann::json(r->values[k].second).dump();
      }
      if (config.include_timings) out << ',' << r->runtime_ms;
      out << '\n';
    }
    return out.str();
  }

  nlohmann::ordered_json root;
  root["version"] = kVersion;
  root["seed"] = config.seed;
  root["checks"] = nlohmann::ordered_json::array();
  for (const CheckReport* r : ordered) {
    nlohmann::ordered_json item;
    item["check_id"] = r->check_id;
    item["claim"] = r->claim;
    item["inputs_digest"] = hex64(r->inputs_digest);
    nlohmann::ordered_json values;
    for (const auto& [name, value] : r->values) values[name] = value;
    item["values"] = std::move(values);
    item["holds"] = r->holds;
    item["tolerance"] = r->tolerance;
    if (config.include_timings) item["runtime_ms"] = r->runtime_ms;
    root["checks"].push_back(std::move(item));
  }
  return root.dump(2) + "\n";
}

void write_reports(const std::vector<CheckReport>& reports, const RunConfig& config) {
  const std::string text = render_reports(reports, config);
  if (config.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.output_path);
  if (!out) throw std::runtime_error("cannot open '" + config.output_path + "' for writing");
  out << text;
}

}  // namespace rif
