#pragma once

#include "occsim/detect/classify.hpp"
#include "occsim/detect/icp.hpp"
#include "occsim/detect/io.hpp"
#include "occsim/detect/keypoints.hpp"
#include "occsim/detect/regions.hpp"
#include "occsim/detect/transform.hpp"
