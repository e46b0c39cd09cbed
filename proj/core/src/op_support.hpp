#pragma once

#include <initializer_list>
#include <string>

#include "spinal/errors.hpp"
#include "spinal/tensor.hpp"

namespace spinal::detail {

// Wraps freshly computed data in a tensor and, when recording is active and an
// operand requires grad, attaches a node holding the operands and backward rule.
Tensor make_result(Shape shape, std::vector<double> data, std::initializer_list<Tensor> operands,
                   const char* name, BackwardFn backward);
Tensor make_result(Shape shape, std::vector<double> data, std::span<const Tensor> operands,
                   const char* name, BackwardFn backward);

[[noreturn]] void shape_fail(const char* op, const std::string& detail);

}  // namespace spinal::detail
