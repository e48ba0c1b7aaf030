// SRM colour swatches for the slider preview, matching the reference
// colour table brackets (nearest bracket at or below the value).

export interface SrmBracket {
  srm: number;
  hex: string;
  name: string;
}

export const SRM_SWATCHES: SrmBracket[] = [
  { srm: 2, hex: "#FFFF45", name: "Pale Straw" },
  { srm: 3, hex: "#FFE93E", name: "Straw" },
  { srm: 4, hex: "#FED849", name: "Pale Gold" },
  { srm: 6, hex: "#FFA846", name: "Deep Gold" },
  { srm: 9, hex: "#F49F44", name: "Pale Amber" },
  { srm: 12, hex: "#D77F59", name: "Medium Amber" },
  { srm: 15, hex: "#94523A", name: "Deep Amber" },
  { srm: 18, hex: "#804541", name: "Amber-Brown" },
  { srm: 20, hex: "#5B342F", name: "Brown" },
  { srm: 24, hex: "#4C3B2B", name: "Ruby Brown" },
  { srm: 30, hex: "#38302E", name: "Deep Brown" },
  { srm: 40, hex: "#31302C", name: "Black" },
];

export function srmSwatch(srm: number): SrmBracket {
  let bracket = SRM_SWATCHES[0];
  for (const entry of SRM_SWATCHES) {
    if (srm >= entry.srm) bracket = entry;
    else break;
  }
  return bracket;
}

export function ebcFromSrm(srm: number): number {
  return srm * 1.97;
}
