/** Fixed 14-color palette keyed to element-id order. */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

export const ELEMENT_NAMES = [
  "empty",
  "wall",
  "sand",
  "water",
  "gas",
  "wood",
  "fire",
  "plant",
  "ice",
  "dust",
  "stone",
  "lava",
  "acid",
  "cloner",
] as const;

export const PALETTE: readonly Rgb[] = [
  { r: 16, g: 16, b: 20 }, // empty: near-black background
  { r: 92, g: 92, b: 98 }, // wall
  { r: 220, g: 177, b: 89 }, // sand
  { r: 64, g: 116, b: 228 }, // water
  { r: 168, g: 178, b: 150 }, // gas
  { r: 122, g: 81, b: 44 }, // wood
  { r: 236, g: 94, b: 38 }, // fire
  { r: 74, g: 164, b: 66 }, // plant
  { r: 158, g: 216, b: 238 }, // ice
  { r: 180, g: 162, b: 126 }, // dust
  { r: 120, g: 110, b: 106 }, // stone
  { r: 208, g: 54, b: 32 }, // lava
  { r: 146, g: 226, b: 58 }, // acid
  { r: 196, g: 110, b: 200 }, // cloner
];
