#pragma once

// Umbrella header: EEG-to-audio band-power reconstruction pipeline.

#include "stimrec/errors.hpp"       // IWYU pragma: export
#include "stimrec/rng.hpp"          // IWYU pragma: export
#include "stimrec/signal.hpp"       // IWYU pragma: export
#include "stimrec/sigproc.hpp"      // IWYU pragma: export
#include "stimrec/spectrogram.hpp"  // IWYU pragma: export
#include "stimrec/io.hpp"           // IWYU pragma: export
#include "stimrec/dataset.hpp"      // IWYU pragma: export
#include "stimrec/synthetic.hpp"    // IWYU pragma: export
#include "stimrec/stats.hpp"        // IWYU pragma: export
#include "stimrec/regression.hpp"   // IWYU pragma: export
#include "stimrec/thread_pool.hpp"  // IWYU pragma: export
#include "stimrec/experiments.hpp"  // IWYU pragma: export
#include "stimrec/report.hpp"       // IWYU pragma: export
