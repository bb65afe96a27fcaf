import { renderLandscape } from "../figures.js";
import { runFigure } from "./common.js";

runFigure("fig-landscape", process.argv.slice(2), (csv) => renderLandscape(csv));
