// Thin typed client over fetch for the service endpoints.

import type {
  IngredientRecord,
  OptimizeJob,
  OptimizeRequest,
  TargetProfile,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`API error ${status}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
    private base = "",
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      const detail = await response.json().catch(() => null);
      throw new ApiError(response.status, detail);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  presets(): Promise<{ presets: TargetProfile[] }> {
    return this.request("/api/targets/presets");
  }

  inventory(): Promise<{ ingredients: IngredientRecord[] }> {
    return this.request("/api/inventory");
  }

  replaceInventory(
    ingredients: IngredientRecord[],
  ): Promise<{ ingredients: IngredientRecord[] }> {
    return this.request("/api/inventory", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ingredients }),
    });
  }

  optimize(request: OptimizeRequest): Promise<{ id: string }> {
    return this.request("/api/optimize", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  job(id: string): Promise<OptimizeJob> {
    return this.request(`/api/jobs/${id}`);
  }

  cancel(id: string): Promise<void> {
    return this.request(`/api/jobs/${id}`, { method: "DELETE" });
  }
}
