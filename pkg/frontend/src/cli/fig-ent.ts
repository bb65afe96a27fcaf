import { renderEntByCircuit } from "../figures.js";
import { runFigure } from "./common.js";

runFigure("fig-ent", process.argv.slice(2), (csv) => renderEntByCircuit(csv));
