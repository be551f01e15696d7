// Copyright 2026 The splatir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace splatir {

/// Worker count used when a caller passes 0: the GSIR_THREADS environment variable if
/// set to a positive integer, otherwise the hardware concurrency (at least 1).
int default_worker_count();

/// Runs body(i) for i in [0, count). Items are split into contiguous chunks, one per
/// worker; the body must only write state owned by item i.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace splatir
