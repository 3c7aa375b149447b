// Minimal surface of the extension APIs this project touches (MV3,
// promise-flavored). Kept local so the build has no typings dependency.

interface ChromeTab {
  id?: number;
  url?: string;
}

declare namespace chrome {
  namespace tabs {
    function query(queryInfo: { active: boolean; currentWindow: boolean }): Promise<ChromeTab[]>;
    function sendMessage(tabId: number, message: unknown): Promise<any>;
  }
  namespace runtime {
    const onMessage: {
      addListener(
        callback: (
          message: any,
          sender: unknown,
          sendResponse: (response: unknown) => void,
        ) => boolean | void,
      ): void;
    };
  }
  namespace storage {
    const local: {
      get(keys: string | string[]): Promise<Record<string, any>>;
      set(items: Record<string, unknown>): Promise<void>;
    };
  }
}
