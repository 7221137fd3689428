#pragma once

namespace hpdg
{

/// Execution policy for the element, edge and patch loops. The serial path
/// is the reference the parallel kernels are tested against.
enum class Exec
{
  serial,
  parallel
};

} // namespace hpdg
