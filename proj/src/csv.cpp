#include "tpb/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "tpb/error.hpp"

namespace tpb {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::io, std::string("bad ") + what + " value '" + s + "' on line " +
                            std::to_string(line_no));
  }
}

std::int64_t parse_int(const std::string& s, const char* what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::io, std::string("bad ") + what + " value '" + s + "' on line " +
                            std::to_string(line_no));
  }
}

}  // namespace

void write_sample_csv(const TwoPhaseSample& sample, const std::string& path) {
  std::size_t k = sample.units.empty() ? 0 : sample.units.front().v.size();
  std::size_t m = 0;
  for (const Unit& u : sample.units)
    if (u.sampled) {
      m = u.x.size();
      break;
    }

  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");

  out << "id,stratum,xi,y,delta";
  for (std::size_t j = 0; j < k; ++j) out << ",v" << (j + 1);
  for (std::size_t j = 0; j < m; ++j) out << ",x" << (j + 1);
  out << "\n";

  for (const Unit& u : sample.units) {
    out << u.id << ',' << u.stratum << ',' << (u.sampled ? 1 : 0) << ','
        << format_double(u.y) << ',' << format_double(u.delta);
    for (std::size_t j = 0; j < k; ++j) out << ',' << format_double(u.v[j]);
    for (std::size_t j = 0; j < m; ++j) {
      out << ',';
      if (u.sampled) out << format_double(u.x[j]);
    }
    out << "\n";
  }
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

TwoPhaseSample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open '" + path + "'");

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::io,
          "'" + path + "' is empty (header row required)");
  auto header = split_csv_line(line);
  require(header.size() >= 5 && header[0] == "id" && header[1] == "stratum" &&
              header[2] == "xi" && header[3] == "y" && header[4] == "delta",
          ErrorCode::io, "'" + path + "' header must start with id,stratum,xi,y,delta");

  std::size_t k = 0, m = 0;
  for (std::size_t c = 5; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name.size() > 1 && name[0] == 'v') {
      require(m == 0, ErrorCode::io, "v-columns must precede x-columns");
      ++k;
    } else if (name.size() > 1 && name[0] == 'x') {
      ++m;
    } else {
      fail(ErrorCode::io, "unrecognized column '" + name + "'");
    }
  }

  TwoPhaseSample sample;
  std::size_t line_no = 1;
  int max_stratum = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == header.size(), ErrorCode::io,
            "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                " fields, expected " + std::to_string(header.size()));
    Unit u;
    u.id = parse_int(fields[0], "id", line_no);
    u.stratum = static_cast<int>(parse_int(fields[1], "stratum", line_no));
    std::int64_t xi = parse_int(fields[2], "xi", line_no);
    require(xi == 0 || xi == 1, ErrorCode::io,
            "xi must be 0 or 1 on line " + std::to_string(line_no));
    u.sampled = xi == 1;
    u.y = parse_double(fields[3], "y", line_no);
    u.delta = parse_double(fields[4], "delta", line_no);
    for (std::size_t j = 0; j < k; ++j) u.v.push_back(parse_double(fields[5 + j], "v", line_no));
    for (std::size_t j = 0; j < m; ++j) {
      const std::string& f = fields[5 + k + j];
      if (u.sampled) {
        u.x.push_back(parse_double(f, "x", line_no));
      } else {
        require(f.empty(), ErrorCode::io,
                "unsampled row carries x value on line " + std::to_string(line_no));
      }
    }
    max_stratum = std::max(max_stratum, u.stratum);
    sample.units.push_back(std::move(u));
  }
  require(!sample.units.empty(), ErrorCode::io, "'" + path + "' holds no data rows");

  // stratum specs are implied by the rows
  require(max_stratum >= 1, ErrorCode::io, "stratum labels must be >= 1");
  std::vector<std::int64_t> count(static_cast<std::size_t>(max_stratum), 0);
  std::vector<std::int64_t> count_sampled(static_cast<std::size_t>(max_stratum), 0);
  for (const Unit& u : sample.units) {
    require(u.stratum >= 1, ErrorCode::io, "stratum labels must be >= 1");
    ++count[u.stratum - 1];
    if (u.sampled) ++count_sampled[u.stratum - 1];
  }
  for (int j = 1; j <= max_stratum; ++j) {
    StratumSpec s;
    s.id = j;
    s.N = count[j - 1];
    s.n = count_sampled[j - 1];
    sample.strata.push_back(s);
  }
  validate_sample(sample);
  return sample;
}

WeightDumpWriter::WeightDumpWriter(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, ErrorCode::io, "cannot open '" + path + "' for writing");
  file_ = f;
  std::fputs("replicate,id,w1,w2,w\n", f);
}

WeightDumpWriter::~WeightDumpWriter() {
  if (file_ != nullptr) std::fclose(static_cast<std::FILE*>(file_));
}

void WeightDumpWriter::append(std::int64_t replicate, const TwoPhaseSample& sample,
                              const std::vector<double>& w1, const std::vector<double>& w2,
                              const std::vector<double>& w) {
  std::FILE* f = static_cast<std::FILE*>(file_);
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    std::fprintf(f, "%lld,%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(replicate),
                 static_cast<long long>(sample.units[i].id), w1[i], w2[i], w[i]);
  }
}

}  // namespace tpb
