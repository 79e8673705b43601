#pragma once

#include <string>
#include <vector>

#include "marlab/approx/checkpoint.hpp"
#include "marlab/approx/lstm.hpp"
#include "marlab/approx/mlp.hpp"
#include "marlab/approx/optimizer.hpp"

namespace marlab::approx {

void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const Mlp& net);
void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const LstmCell& cell);
void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const Optimizer& opt);

void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, Mlp& net);
void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, LstmCell& cell);
void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, Optimizer& opt);

}  // namespace marlab::approx
