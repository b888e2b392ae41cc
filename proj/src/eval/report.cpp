#include "agentrec/eval/report.hpp"

#include <cmath>
#include <cstdio>

#include "agentrec/error.hpp"
#include "agentrec/util/fs.hpp"

namespace agentrec::eval {

using nlohmann::json;

std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // %.60f prints enough of the exact binary expansion that a tie at the
  // fifth decimal is visible as "5" followed only by zeros.
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.60f", std::fabs(v));
  const std::string full(buf);
  const auto dot = full.find('.');
  std::string digits = full.substr(0, dot) + full.substr(dot + 1, 4);
  const std::string rest = full.substr(dot + 5);
  bool up = false;
  if (rest[0] > '5') {
    up = true;
  } else if (rest[0] == '5') {
    const bool exact_tie = rest.find_first_not_of('0', 1) == std::string::npos;
    up = !exact_tie || ((digits.back() - '0') % 2 == 1);
  }
  if (up) {
    int i = static_cast<int>(digits.size()) - 1;
    while (i >= 0 && digits[static_cast<std::size_t>(i)] == '9') digits[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) {
      digits.insert(digits.begin(), '1');
    } else {
      ++digits[static_cast<std::size_t>(i)];
    }
  }
  std::string out = digits.substr(0, digits.size() - 4) + "." + digits.substr(digits.size() - 4);
  const bool zero = out.find_first_not_of("0.") == std::string::npos;
  if (std::signbit(v) && !zero) out.insert(out.begin(), '-');
  return out;
}

namespace {

using Cells = std::vector<std::string>;

const Cells kMetricHeader = {"P@K",  "R@K",  "F1",   "MRR",  "NDCG", "R1-P", "R1-R", "R1-F",
                             "R2-P", "R2-R", "R2-F", "RL-P", "RL-R", "RL-F"};
const char* kCsvHeader =
    "model_id,agent,records,p_at_k,r_at_k,f1,mrr,ndcg,rouge1_p,rouge1_r,rouge1_f,"
    "rouge2_p,rouge2_r,rouge2_f,rougeL_p,rougeL_r,rougeL_f";

template <typename T>
Cells metric_cells(const T& v, const std::string& absent) {
  Cells c;
  auto num = [&](const std::optional<double>& x) { c.push_back(x ? format_metric(*x) : absent); };
  auto rouge = [&](const std::optional<metrics::RougeScore>& x) {
    num(x ? std::optional(x->precision) : std::nullopt);
    num(x ? std::optional(x->recall) : std::nullopt);
    num(x ? std::optional(x->f) : std::nullopt);
  };
  num(v.p_at_k);
  num(v.r_at_k);
  num(v.f1);
  num(v.mrr);
  num(v.ndcg);
  rouge(v.rouge1);
  rouge(v.rouge2);
  rouge(v.rougeL);
  return c;
}

// Leading `text_cols` columns are left-aligned, the rest right-aligned.
std::string render_table(const std::vector<Cells>& table, std::size_t text_cols) {
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      const std::string pad(width[i] - row[i].size(), ' ');
      line += i < text_cols ? row[i] + pad : pad + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

Report render_report(const std::vector<MetricRow>& rows, const std::vector<SystemScore>& scores) {
  Report r;
  std::vector<Cells> table;
  Cells header = {"model", "agent", "n"};
  header.insert(header.end(), kMetricHeader.begin(), kMetricHeader.end());
  table.push_back(header);
  r.csv = std::string(kCsvHeader) + "\n";
  for (const auto& row : rows) {
    Cells line = {row.model_id, std::string(to_string(row.agent)), std::to_string(row.records)};
    const auto m = metric_cells(row, "-");
    line.insert(line.end(), m.begin(), m.end());
    table.push_back(line);

    std::string csv = csv_field(row.model_id) + "," + std::string(to_string(row.agent)) + "," +
                      std::to_string(row.records);
    for (const auto& c : metric_cells(row, "")) csv += "," + c;
    r.csv += csv + "\n";
  }
  r.text = render_table(table, 2);

  if (!scores.empty()) {
    std::vector<Cells> st;
    Cells sh = {"model", "rows"};
    sh.insert(sh.end(), kMetricHeader.begin(), kMetricHeader.end());
    st.push_back(sh);
    for (const auto& s : scores) {
      Cells line = {s.model_id.empty() ? std::string("(all)") : s.model_id, std::to_string(s.rows)};
      const auto m = metric_cells(s, "-");
      line.insert(line.end(), m.begin(), m.end());
      st.push_back(line);
    }
    r.text += "\noverall mean\n" + render_table(st, 1);
  }
  return r;
}

Evaluation evaluate_all(const std::vector<EvalRecord>& records, const std::vector<OutputRun>& runs,
                        metrics::ExecPolicy policy) {
  Evaluation ev;
  for (const auto& run : runs) {
    auto rows = evaluate_run(records, run, policy);
    ev.scores.push_back(overall_mean(rows));
    ev.rows.insert(ev.rows.end(), rows.begin(), rows.end());
  }
  return ev;
}

json report_json(const Evaluation& ev, const std::string& dataset_name, std::size_t record_count) {
  json rows = json::array();
  for (const auto& r : ev.rows) rows.push_back(to_json(r));
  json scores = json::array();
  for (const auto& s : ev.scores) scores.push_back(to_json(s));
  const Report rep = render_report(ev.rows, ev.scores);
  return {{"format", "agentrec-report/1"}, {"dataset", dataset_name}, {"records", record_count},
          {"rows", rows}, {"scores", scores}, {"text", rep.text}, {"csv", rep.csv}};
}

void write_report(const std::filesystem::path& path, const json& report) {
  util::write_file_atomic(path, report.dump(2) + "\n");
}

json read_report(const std::filesystem::path& path) {
  const auto text = util::read_file(path);
  if (!text) throw Error(ErrorCode::kNotFound, "no report at " + path.string());
  try {
    return json::parse(*text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace agentrec::eval
