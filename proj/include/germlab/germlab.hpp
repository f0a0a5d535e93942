#pragma once

// Umbrella header for the random local complex dynamics laboratory.

#include "germlab/brjuno.hpp"
#include "germlab/classify.hpp"
#include "germlab/emit.hpp"
#include "germlab/ensemble_io.hpp"
#include "germlab/gallery.hpp"
#include "germlab/germ_ensemble.hpp"
#include "germlab/invariant_form.hpp"
#include "germlab/jet.hpp"
#include "germlab/jet_io.hpp"
#include "germlab/limit_map.hpp"
#include "germlab/lyapunov.hpp"
#include "germlab/matrix_ensemble.hpp"
#include "germlab/multi_index.hpp"
#include "germlab/orbit.hpp"
#include "germlab/product.hpp"
#include "germlab/rng.hpp"
#include "germlab/rotation_example.hpp"
#include "germlab/trapping.hpp"
