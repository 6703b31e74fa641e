#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "badmm/certify.hpp"
#include "badmm/problem.hpp"

namespace badmm {

// JSON documents. Doubles are written in shortest round-trip form so a
// save/load cycle reproduces every value bit for bit.

void save_instance(std::ostream& os, const ProblemInstance& inst);
ProblemInstance load_instance(std::istream& is);
void save_instance_file(const std::string& path, const ProblemInstance& inst);
ProblemInstance load_instance_file(const std::string& path);

enum class StopCriterion { absolute, relative };

const char* to_string(StopCriterion s);
StopCriterion parse_stop_criterion(const std::string& s);

struct StoredCertificate {
  Certificate cert;
  StopCriterion criterion = StopCriterion::absolute;
  double rho = 1e-5;
  double eta = 1e-5;
  std::optional<BlockVector> x0;  // reference point for the relative criterion
  std::string algorithm;
};

void save_certificate(std::ostream& os, const StoredCertificate& sc);
StoredCertificate load_certificate(std::istream& is);
void save_certificate_file(const std::string& path, const StoredCertificate& sc);
StoredCertificate load_certificate_file(const std::string& path);

}  // namespace badmm
