#pragma once

#include <string>

#include "tpb/design.hpp"

namespace tpb {

// Sample CSV format: header `id,stratum,xi,y,delta,v1..vk,x1..xm`;
// x-columns are left empty on rows with xi = 0.
void write_sample_csv(const TwoPhaseSample& sample, const std::string& path);

TwoPhaseSample read_sample_csv(const std::string& path);

// Replicate-weight dump: replicate,id,w1,w2,w.
class WeightDumpWriter {
 public:
  explicit WeightDumpWriter(const std::string& path);
  ~WeightDumpWriter();
  void append(std::int64_t replicate, const TwoPhaseSample& sample,
              const std::vector<double>& w1, const std::vector<double>& w2,
              const std::vector<double>& w);

 private:
  void* file_;
};

}  // namespace tpb
