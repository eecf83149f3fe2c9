// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "aquacast/errors.hpp"

namespace aquacast::cli {

namespace {

int config_rank(const std::string& c) {
  if (c == "NoRain") return 0;
  if (c == "RainHist") return 1;
  if (c == "RainFull") return 2;
  return 3;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::vector<ReportRow> collect_rows(const std::vector<nlohmann::json>& evals) {
  std::vector<ReportRow> rows;
  std::set<std::tuple<std::string, std::size_t, std::string>> seen;
  std::string units;
  for (const auto& e : evals) {
    const std::string config = e.at("config").get<std::string>();
    const std::size_t horizon = e.at("horizon").get<std::size_t>();
    const auto& m = e.at("metrics");
    const std::string u = m.at("units").get<std::string>();
    if (!units.empty() && u != units) {
      throw InputError("evaluations mix " + units + " and " + u + " units");
    }
    units = u;
    for (const auto& t : m.at("targets")) {
      ReportRow r;
      r.sensor = t.at("name").get<std::string>();
      r.horizon = horizon;
      r.config = config;
      r.units = u;
      r.mse = t.at("mse").get<double>();
      r.mae = t.at("mae").get<double>();
      r.rmse = t.at("rmse").get<double>();
      if (!t.at("r2").is_null()) r.r2 = t.at("r2").get<double>();
      r.auc = t.at("auc").get<double>();
      if (!seen.emplace(r.sensor, r.horizon, r.config).second) {
        throw InputError("duplicate evaluation for " + r.sensor + " " + r.config + " horizon " +
                         std::to_string(r.horizon));
      }
      rows.push_back(std::move(r));
    }
  }

  // Sensor averages per cell, the layout of the published comparison tables.
  std::map<std::pair<std::size_t, int>, std::vector<const ReportRow*>> cells;
  for (const auto& r : rows) cells[{r.horizon, config_rank(r.config)}].push_back(&r);
  std::vector<ReportRow> averages;
  for (const auto& [key, members] : cells) {
    ReportRow a;
    a.sensor = kAverageSensor;
    a.horizon = members.front()->horizon;
    a.config = members.front()->config;
    a.units = members.front()->units;
    double r2 = 0.0;
    bool all_r2 = true;
    for (const ReportRow* r : members) {
      a.mse += r->mse;
      a.mae += r->mae;
      a.rmse += r->rmse;
      a.auc += r->auc;
      if (r->r2) {
        r2 += *r->r2;
      } else {
        all_r2 = false;
      }
    }
    const double n = static_cast<double>(members.size());
    a.mse /= n;
    a.mae /= n;
    a.rmse /= n;
    a.auc /= n;
    if (all_r2) a.r2 = r2 / n;
    averages.push_back(std::move(a));
  }
  rows.insert(rows.end(), averages.begin(), averages.end());

  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    const bool aa = a.sensor == kAverageSensor, ba = b.sensor == kAverageSensor;
    return std::make_tuple(aa, a.sensor, a.horizon, config_rank(a.config)) <
           std::make_tuple(ba, b.sensor, b.horizon, config_rank(b.config));
  });
  return rows;
}

std::vector<ForecastSample> collect_samples(const std::vector<nlohmann::json>& evals) {
  std::vector<ForecastSample> out;
  for (const auto& e : evals) {
    if (!e.contains("samples")) continue;
    for (const auto& s : e.at("samples")) {
      ForecastSample f;
      f.sensor = s.at("sensor").get<std::string>();
      f.config = e.at("config").get<std::string>();
      f.horizon = e.at("horizon").get<std::size_t>();
      f.units = e.at("metrics").at("units").get<std::string>();
      f.start = s.at("start").get<std::string>();
      f.history = s.at("history").get<std::vector<double>>();
      f.truth = s.at("truth").get<std::vector<double>>();
      f.forecast = s.at("forecast").get<std::vector<double>>();
      out.push_back(std::move(f));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ForecastSample& a, const ForecastSample& b) {
    return std::make_tuple(a.sensor, a.horizon, config_rank(a.config)) <
           std::make_tuple(b.sensor, b.horizon, config_rank(b.config));
  });
  return out;
}

std::string table_csv(const std::vector<ReportRow>& rows) {
  std::string out = "sensor,horizon,config,units,mse,mae,rmse,r2,auc\n";
  for (const auto& r : rows) {
    out += csv_field(r.sensor) + ',' + std::to_string(r.horizon) + ',' + r.config + ',' + r.units +
           ',' + num(r.mse) + ',' + num(r.mae) + ',' + num(r.rmse) + ',' +
           (r.r2 ? num(*r.r2) : std::string()) + ',' + num(r.auc) + '\n';
  }
  return out;
}

nlohmann::json table_json(const std::vector<ReportRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"sensor", r.sensor},
                 {"horizon", r.horizon},
                 {"config", r.config},
                 {"units", r.units},
                 {"mse", r.mse},
                 {"mae", r.mae},
                 {"rmse", r.rmse},
                 {"r2", r.r2 ? nlohmann::json(*r.r2) : nlohmann::json(nullptr)},
                 {"auc", r.auc}});
  }
  return j;
}

std::string sample_file_name(const ForecastSample& s) {
  std::string name = s.sensor;
  for (char& c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return name + "__" + s.config + "_h" + std::to_string(s.horizon) + ".svg";
}

std::string forecast_svg(const ForecastSample& s) {
  const double width = 720, height = 320, left = 64, right = 16, top = 36, bottom = 40;
  const double pw = width - left - right, ph = height - top - bottom;
  const std::size_t nh = s.history.size(), total = nh + s.truth.size();

  double lo = INFINITY, hi = -INFINITY;
  for (const auto* v : {&s.history, &s.truth, &s.forecast}) {
    for (double x : *v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  if (!(lo < hi)) {
    lo = (std::isfinite(lo) ? lo : 0.0) - 0.5;
    hi = lo + 1.0;
  }
  const double span = total > 1 ? static_cast<double>(total - 1) : 1.0;
  auto px = [&](std::size_t i) { return left + pw * static_cast<double>(i) / span; };
  auto py = [&](double v) { return top + ph * (hi - v) / (hi - lo); };
  auto line = [&](const std::vector<double>& v, std::size_t offset, const char* colour,
                  const char* extra) {
    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += coord(px(offset + i)) + ',' + coord(py(v[i]));
    }
    return "  <polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\"" + extra + " points=\"" + pts + "\"/>\n";
  };

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) + "\" height=\"" +
         coord(height) + "\" viewBox=\"0 0 " + coord(width) + ' ' + coord(height) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + coord(width) + "\" height=\"" + coord(height) +
         "\" fill=\"white\"/>\n";
  svg += "  <text x=\"" + coord(left) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" +
         xml_escape(s.sensor + "  " + s.config + "  horizon " + std::to_string(s.horizon) +
                    "  from " + s.start) +
         "</text>\n";
  svg += "  <rect x=\"" + coord(left) + "\" y=\"" + coord(top) + "\" width=\"" + coord(pw) +
         "\" height=\"" + coord(ph) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  if (nh > 0) {
    svg += "  <line x1=\"" + coord(px(nh)) + "\" y1=\"" + coord(top) + "\" x2=\"" + coord(px(nh)) +
           "\" y2=\"" + coord(top + ph) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (double v : {lo, hi}) {
    svg += "  <text x=\"" + coord(left - 6) + "\" y=\"" + coord(py(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(v) +
           "</text>\n";
  }
  svg += "  <text x=\"" + coord(left + pw / 2) + "\" y=\"" + coord(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">15-minute steps (" +
         xml_escape(s.units) + ")</text>\n";
  svg += line(s.history, 0, "#777", "");
  // Truth continues from the last history sample so the curve is unbroken.
  std::vector<double> truth = s.truth;
  std::size_t truth_offset = nh;
  if (nh > 0) {
    truth.insert(truth.begin(), s.history.back());
    truth_offset = nh - 1;
  }
  svg += line(truth, truth_offset, "#000", "");
  svg += line(s.forecast, nh, "#d62728", " stroke-dasharray=\"5 2\"");
  const double lx = left + pw - 170, ly = top + 14;
  svg += "  <line x1=\"" + coord(lx) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(lx + 20) +
         "\" y2=\"" + coord(ly) + "\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";
  svg += "  <text x=\"" + coord(lx + 26) + "\" y=\"" + coord(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">ground truth</text>\n";
  svg += "  <line x1=\"" + coord(lx + 100) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(lx + 120) +
         "\" y2=\"" + coord(ly) + "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  svg += "  <text x=\"" + coord(lx + 126) + "\" y=\"" + coord(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">forecast</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace aquacast::cli
