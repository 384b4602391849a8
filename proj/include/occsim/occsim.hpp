#pragma once

#include "occsim/channel.hpp"
#include "occsim/controller.hpp"
#include "occsim/detect.hpp"
#include "occsim/harness.hpp"
#include "occsim/modem.hpp"
#include "occsim/modem_io.hpp"
#include "occsim/ranging.hpp"
#include "occsim/scene.hpp"
#include "occsim/scene_io.hpp"
