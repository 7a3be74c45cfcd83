#pragma once

namespace shocklab {

struct AiryPair {
  double ai;
  double aip;
};

// Ai and Ai' on the real line; absolute accuracy about 1e-13 on [-10, 10].
AiryPair airy(double x);
double airy_ai(double x);
double airy_ai_prime(double x);

}  // namespace shocklab
