import { renderSaturation } from "../figures.js";
import { runFigure } from "./common.js";

runFigure("fig-saturation", process.argv.slice(2), renderSaturation);
