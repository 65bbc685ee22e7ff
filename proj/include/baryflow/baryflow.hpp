#pragma once

#include "baryflow/composite.hpp"
#include "baryflow/error.hpp"
#include "baryflow/filters.hpp"
#include "baryflow/hash.hpp"
#include "baryflow/image.hpp"
#include "baryflow/math.hpp"
#include "baryflow/parallel.hpp"
#include "baryflow/pipeline.hpp"
#include "baryflow/png_io.hpp"
#include "baryflow/render.hpp"
#include "baryflow/scene.hpp"
#include "baryflow/sequence.hpp"
#include "baryflow/testscenes.hpp"
